#include "digits.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

namespace testdata {

namespace {

struct Rect {
  int row0, row1, col0, col1;  // inclusive
};

// Seven-segment layout on a 28x28 canvas.
constexpr Rect kSegments[7] = {
    {4, 6, 9, 18},    // A: top bar
    {5, 13, 17, 19},  // B: upper right
    {14, 22, 17, 19}, // C: lower right
    {21, 23, 9, 18},  // D: bottom bar
    {14, 22, 8, 10},  // E: lower left
    {5, 13, 8, 10},   // F: upper left
    {13, 15, 9, 18},  // G: middle bar
};

// Which segments light up for each digit (A..G).
constexpr bool kGlyph[10][7] = {
    {1, 1, 1, 1, 1, 1, 0},  // 0
    {0, 1, 1, 0, 0, 0, 0},  // 1
    {1, 1, 0, 1, 1, 0, 1},  // 2
    {1, 1, 1, 1, 0, 0, 1},  // 3
    {0, 1, 1, 0, 0, 1, 1},  // 4
    {1, 0, 1, 1, 0, 1, 1},  // 5
    {1, 0, 1, 1, 1, 1, 1},  // 6
    {1, 1, 1, 0, 0, 0, 0},  // 7
    {1, 1, 1, 1, 1, 1, 1},  // 8
    {1, 1, 1, 1, 0, 1, 1},  // 9
};

}  // namespace

plb::Dataset make_digits(int count, std::uint64_t seed) {
  const plb::Shape shape{1, 28, 28};
  plb::Dataset data;
  data.shape = shape;
  data.class_count = 10;
  data.examples.reserve(static_cast<std::size_t>(count));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> shift(-3, 3);
  std::uniform_real_distribution<double> amplitude(0.75, 1.0);
  std::uniform_real_distribution<double> seg_jitter(-0.1, 0.1);
  std::normal_distribution<double> pixel_noise(0.0, 0.06);

  for (int n = 0; n < count; ++n) {
    const int digit = n % 10;
    const int dy = shift(rng);
    const int dx = shift(rng);
    const double amp = amplitude(rng);

    plb::Image img(shape);
    for (int s = 0; s < 7; ++s) {
      if (!kGlyph[digit][s]) continue;
      const double level = std::clamp(amp + seg_jitter(rng), 0.0, 1.0);
      const Rect& r = kSegments[s];
      for (int i = r.row0; i <= r.row1; ++i) {
        for (int j = r.col0; j <= r.col1; ++j) {
          const int ii = i + dy;
          const int jj = j + dx;
          if (ii >= 0 && ii < 28 && jj >= 0 && jj < 28) {
            img.at(0, ii, jj) = level;
          }
        }
      }
    }
    for (double& v : img.data()) {
      v = std::clamp(v + pixel_noise(rng), 0.0, 1.0);
    }
    data.examples.push_back({std::move(img), digit});
  }
  return data;
}

DigitSplits load_digit_splits(int train_count, int test_count,
                              std::uint64_t seed) {
  namespace fs = std::filesystem;

  if (const char* dir = std::getenv("PLB_MNIST_DIR"); dir != nullptr) {
    const fs::path base(dir);
    const fs::path train_images = base / "train-images-idx3-ubyte";
    const fs::path train_labels = base / "train-labels-idx1-ubyte";
    const fs::path test_images = base / "t10k-images-idx3-ubyte";
    const fs::path test_labels = base / "t10k-labels-idx1-ubyte";
    if (fs::exists(train_images) && fs::exists(train_labels) &&
        fs::exists(test_images) && fs::exists(test_labels)) {
      DigitSplits splits;
      splits.synthetic = false;
      splits.train = plb::load_idx(train_images.string(), train_labels.string());
      splits.test = plb::load_idx(test_images.string(), test_labels.string());
      auto take = [](plb::Dataset& d, int count) {
        if (count < static_cast<int>(d.examples.size())) {
          d.examples.resize(static_cast<std::size_t>(count));
        }
      };
      take(splits.train, train_count);
      take(splits.test, test_count);
      return splits;
    }
  }

  // Synthetic path: write IDX files once per (sizes, seed) and reload them
  // through the production parser.
  const fs::path dir =
      fs::temp_directory_path() /
      ("plb-digits-" + std::to_string(train_count) + "-" +
       std::to_string(test_count) + "-" + std::to_string(seed));
  fs::create_directories(dir);
  const fs::path train_images = dir / "train-images.idx";
  const fs::path train_labels = dir / "train-labels.idx";
  const fs::path test_images = dir / "test-images.idx";
  const fs::path test_labels = dir / "test-labels.idx";

  plb::save_idx(make_digits(train_count, seed), train_images.string(),
                train_labels.string());
  plb::save_idx(make_digits(test_count, seed + 1), test_images.string(),
                test_labels.string());

  DigitSplits splits;
  splits.train = plb::load_idx(train_images.string(), train_labels.string());
  splits.test = plb::load_idx(test_images.string(), test_labels.string());
  return splits;
}

}  // namespace testdata
