#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plb/tensor.hpp"

namespace plb {

struct Dataset {
  Shape shape;
  std::vector<LabeledExample> examples;
  int class_count = 0;
};

// IDX (big-endian) image + label pair, as distributed for MNIST-style sets.
// Pixels are scaled to [0,1] by dividing by 255. Throws std::runtime_error
// on missing files, bad magic numbers, or mismatched counts.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

void save_idx(const Dataset& data, const std::string& images_path,
              const std::string& labels_path);

// Synthetic Gaussian blobs on a CxHxW grid: class k's center pixel pattern
// is drawn from a fixed circle inside [0,1] so examples stay in the box
// after clamping. Deterministic given the seed.
Dataset generate_blobs(const Shape& shape, int classes, int per_class,
                       double noise, std::uint64_t seed);

// Deterministic subsample without replacement, preserving original order.
std::vector<int> sample_indices(int population, int count, std::uint64_t seed);

}  // namespace plb
