#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace plb {

// Components below this magnitude count as zero for the l0 distance.
inline constexpr double kL0Tolerance = 1e-12;

struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  int count() const { return channels * height * width; }
  bool operator==(const Shape&) const = default;
};

// Dense grid of 64-bit reals, flattened channel-major then row-major:
// index(c, i, j) = (c*H + i)*W + j.
class Image {
 public:
  Image() = default;
  explicit Image(Shape shape, double fill = 0.0);
  Image(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  int size() const { return static_cast<int>(data_.size()); }

  double operator[](int idx) const { return data_[idx]; }
  double& operator[](int idx) { return data_[idx]; }

  double at(int c, int i, int j) const { return data_[index(c, i, j)]; }
  double& at(int c, int i, int j) { return data_[index(c, i, j)]; }
  int index(int c, int i, int j) const {
    return (c * shape_.height + i) * shape_.width + j;
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool all_finite() const;

  Image& operator+=(const Image& rhs);
  Image& operator-=(const Image& rhs);
  Image& operator*=(double s);

 private:
  Shape shape_;
  std::vector<double> data_;
};

Image operator+(Image lhs, const Image& rhs);
Image operator-(Image lhs, const Image& rhs);
Image operator*(double s, Image rhs);

struct LabeledExample {
  Image image;
  int label = 0;
};

enum class Metric { L0, L1, L2, Linf, TV };

inline constexpr Metric kAllMetrics[] = {Metric::L0, Metric::L1, Metric::L2,
                                         Metric::Linf, Metric::TV};

std::string metric_name(Metric m);
std::optional<Metric> metric_from_name(const std::string& name);

// Clamp every component to [0, 1]. Throws std::invalid_argument on
// non-finite input. Idempotent.
Image box_project(const Image& z);

// Dissimilarity m(u; x) between a candidate and the clean image.
double metric_eval(Metric metric, const Image& u, const Image& x);

// Number of components of u - x with magnitude above kL0Tolerance.
double l0_distance(const Image& u, const Image& x);
// Number of spatial positions where any channel differs; reporting variant
// for multi-channel images.
double l0_pixel_distance(const Image& u, const Image& x);

double l1_distance(const Image& u, const Image& x);
double l2_distance(const Image& u, const Image& x);
double linf_distance(const Image& u, const Image& x);

}  // namespace plb
