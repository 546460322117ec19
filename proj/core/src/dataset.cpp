#include "plb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace plb {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    const int c = in.get();
    if (c == EOF) throw std::runtime_error("load_idx: truncated file " + path);
    v = (v << 8) | static_cast<std::uint32_t>(c);
  }
  return v;
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) {
    out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

}  // namespace

Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path) {
  std::ifstream images(images_path, std::ios::binary);
  if (!images) throw std::runtime_error("load_idx: cannot open " + images_path);
  std::ifstream labels(labels_path, std::ios::binary);
  if (!labels) throw std::runtime_error("load_idx: cannot open " + labels_path);

  if (read_u32_be(images, images_path) != kImageMagic) {
    throw std::runtime_error("load_idx: bad image magic in " + images_path);
  }
  const std::uint32_t count = read_u32_be(images, images_path);
  const std::uint32_t rows = read_u32_be(images, images_path);
  const std::uint32_t cols = read_u32_be(images, images_path);
  if (count == 0 || rows == 0 || cols == 0 || rows > 4096 || cols > 4096) {
    throw std::runtime_error("load_idx: implausible dimensions in " +
                             images_path);
  }

  if (read_u32_be(labels, labels_path) != kLabelMagic) {
    throw std::runtime_error("load_idx: bad label magic in " + labels_path);
  }
  const std::uint32_t label_count = read_u32_be(labels, labels_path);
  if (label_count != count) {
    throw std::runtime_error("load_idx: image/label counts differ (" +
                             std::to_string(count) + " vs " +
                             std::to_string(label_count) + ")");
  }

  Dataset data;
  data.shape = Shape{1, static_cast<int>(rows), static_cast<int>(cols)};
  data.examples.reserve(count);

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> buf(pixels);
  int max_label = 0;
  for (std::uint32_t n = 0; n < count; ++n) {
    images.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(pixels));
    if (static_cast<std::size_t>(images.gcount()) != pixels) {
      throw std::runtime_error("load_idx: truncated file " + images_path);
    }
    Image img(data.shape);
    for (std::size_t i = 0; i < pixels; ++i) {
      img[static_cast<int>(i)] = static_cast<double>(buf[i]) / 255.0;
    }
    const int label = labels.get();
    if (label == EOF) {
      throw std::runtime_error("load_idx: truncated file " + labels_path);
    }
    max_label = std::max(max_label, label);
    data.examples.push_back({std::move(img), label});
  }
  data.class_count = max_label + 1;
  return data;
}

void save_idx(const Dataset& data, const std::string& images_path,
              const std::string& labels_path) {
  if (data.examples.empty()) {
    throw std::invalid_argument("save_idx: empty dataset");
  }
  if (data.shape.channels != 1) {
    throw std::invalid_argument("save_idx: IDX stores single-channel images");
  }
  std::ofstream images(images_path, std::ios::binary);
  if (!images) throw std::runtime_error("save_idx: cannot open " + images_path);
  std::ofstream labels(labels_path, std::ios::binary);
  if (!labels) throw std::runtime_error("save_idx: cannot open " + labels_path);

  write_u32_be(images, kImageMagic);
  write_u32_be(images, static_cast<std::uint32_t>(data.examples.size()));
  write_u32_be(images, static_cast<std::uint32_t>(data.shape.height));
  write_u32_be(images, static_cast<std::uint32_t>(data.shape.width));
  write_u32_be(labels, kLabelMagic);
  write_u32_be(labels, static_cast<std::uint32_t>(data.examples.size()));

  for (const LabeledExample& ex : data.examples) {
    if (!(ex.image.shape() == data.shape)) {
      throw std::invalid_argument("save_idx: example shape mismatch");
    }
    for (int i = 0; i < ex.image.size(); ++i) {
      const double v = std::clamp(ex.image[i], 0.0, 1.0);
      images.put(static_cast<char>(std::lround(v * 255.0)));
    }
    if (ex.label < 0 || ex.label > 255) {
      throw std::invalid_argument("save_idx: label out of byte range");
    }
    labels.put(static_cast<char>(ex.label));
  }
  if (!images || !labels) {
    throw std::runtime_error("save_idx: write failed");
  }
}

Dataset generate_blobs(const Shape& shape, int classes, int per_class,
                       double noise, std::uint64_t seed) {
  if (shape.count() < 1 || classes < 2 || per_class < 1 || !(noise >= 0)) {
    throw std::invalid_argument("generate_blobs: bad parameters");
  }

  // Class centers are sinusoidal patterns with evenly spaced phases: every
  // component lies on a circle of radius 0.25 around 0.5, so the centers sit
  // well inside [0,1]^n and samples survive clamping mostly intact.
  const int n = shape.count();
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(classes));
  for (int k = 0; k < classes; ++k) {
    centers[k].resize(static_cast<std::size_t>(n));
    const double phase = 2.0 * M_PI * static_cast<double>(k) / classes;
    for (int p = 0; p < n; ++p) {
      const double angle = phase + 2.0 * M_PI * static_cast<double>(p) / n;
      centers[k][static_cast<std::size_t>(p)] = 0.5 + 0.25 * std::cos(angle);
    }
  }

  Dataset data;
  data.shape = shape;
  data.class_count = classes;
  data.examples.reserve(static_cast<std::size_t>(classes) * per_class);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  for (int rep = 0; rep < per_class; ++rep) {
    for (int k = 0; k < classes; ++k) {
      Image img(shape);
      for (int p = 0; p < n; ++p) {
        const double v = centers[k][static_cast<std::size_t>(p)] +
                         noise * jitter(rng);
        img[p] = std::clamp(v, 0.0, 1.0);
      }
      data.examples.push_back({std::move(img), k});
    }
  }
  return data;
}

std::vector<int> sample_indices(int population, int count, std::uint64_t seed) {
  if (population < 0 || count < 0) {
    throw std::invalid_argument("sample_indices: negative sizes");
  }
  std::vector<int> all(static_cast<std::size_t>(population));
  std::iota(all.begin(), all.end(), 0);
  if (count >= population) return all;

  // Partial Fisher-Yates: only the first `count` slots are decided.
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, population - 1);
    std::swap(all[static_cast<std::size_t>(i)],
              all[static_cast<std::size_t>(pick(rng))]);
  }
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace plb
