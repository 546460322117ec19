#include "plb/pnm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace plb {

void write_pnm(const Image& img, const std::string& path) {
  const Shape& s = img.shape();
  if (s.channels != 1 && s.channels != 3) {
    throw std::invalid_argument(
        "write_pnm: only 1-channel (PGM) or 3-channel (PPM) images");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pnm: cannot open " + path);

  out << (s.channels == 1 ? "P5" : "P6") << '\n'
      << s.width << ' ' << s.height << '\n'
      << "255\n";
  for (int i = 0; i < s.height; ++i) {
    for (int j = 0; j < s.width; ++j) {
      for (int c = 0; c < s.channels; ++c) {
        const double v = std::clamp(img.at(c, i, j), 0.0, 1.0);
        out.put(static_cast<char>(std::lround(v * 255.0)));
      }
    }
  }
  if (!out) throw std::runtime_error("write_pnm: write failed for " + path);
}

}  // namespace plb
