#pragma once

#include <string>

#include "plb/tensor.hpp"

namespace plb {

// Writes 1-channel images as binary PGM (P5) and 3-channel as binary PPM
// (P6), maxval 255. Values clamp to [0,1] and round half away from zero.
// Throws std::invalid_argument for other channel counts.
void write_pnm(const Image& img, const std::string& path);

}  // namespace plb
