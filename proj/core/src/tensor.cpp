#include "plb/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "plb/tv.hpp"

namespace plb {

namespace {

void require_positive(const Shape& s) {
  if (s.channels < 1 || s.height < 1 || s.width < 1) {
    throw std::invalid_argument("Image: shape dimensions must be positive");
  }
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!(a.shape() == b.shape())) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

Image::Image(Shape shape, double fill) : shape_(shape) {
  require_positive(shape);
  data_.assign(static_cast<std::size_t>(shape.count()), fill);
}

Image::Image(Shape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  require_positive(shape);
  if (static_cast<int>(data_.size()) != shape.count()) {
    throw std::invalid_argument("Image: data size does not match shape");
  }
}

bool Image::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Image& Image::operator+=(const Image& rhs) {
  require_same_shape(*this, rhs, "Image::operator+=");
  for (int i = 0; i < size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Image& Image::operator-=(const Image& rhs) {
  require_same_shape(*this, rhs, "Image::operator-=");
  for (int i = 0; i < size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Image& Image::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Image operator+(Image lhs, const Image& rhs) { return lhs += rhs; }
Image operator-(Image lhs, const Image& rhs) { return lhs -= rhs; }
Image operator*(double s, Image rhs) { return rhs *= s; }

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::L0: return "l0";
    case Metric::L1: return "l1";
    case Metric::L2: return "l2";
    case Metric::Linf: return "linf";
    case Metric::TV: return "tv";
  }
  throw std::invalid_argument("metric_name: unknown metric");
}

std::optional<Metric> metric_from_name(const std::string& name) {
  for (Metric m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

Image box_project(const Image& z) {
  if (!z.all_finite()) {
    throw std::invalid_argument("box_project: input has non-finite values");
  }
  Image out = z;
  for (double& v : out.data()) {
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
  }
  return out;
}

double metric_eval(Metric metric, const Image& u, const Image& x) {
  switch (metric) {
    case Metric::L0: return l0_distance(u, x);
    case Metric::L1: return l1_distance(u, x);
    case Metric::L2: return l2_distance(u, x);
    case Metric::Linf: return linf_distance(u, x);
    case Metric::TV: return tv_seminorm(u - x);
  }
  throw std::invalid_argument("metric_eval: unknown metric");
}

double l0_distance(const Image& u, const Image& x) {
  require_same_shape(u, x, "l0_distance");
  int count = 0;
  for (int i = 0; i < u.size(); ++i) {
    if (std::abs(u[i] - x[i]) > kL0Tolerance) ++count;
  }
  return static_cast<double>(count);
}

double l0_pixel_distance(const Image& u, const Image& x) {
  require_same_shape(u, x, "l0_pixel_distance");
  const Shape& s = u.shape();
  int count = 0;
  for (int i = 0; i < s.height; ++i) {
    for (int j = 0; j < s.width; ++j) {
      for (int c = 0; c < s.channels; ++c) {
        if (std::abs(u.at(c, i, j) - x.at(c, i, j)) > kL0Tolerance) {
          ++count;
          break;
        }
      }
    }
  }
  return static_cast<double>(count);
}

double l1_distance(const Image& u, const Image& x) {
  require_same_shape(u, x, "l1_distance");
  double sum = 0;
  for (int i = 0; i < u.size(); ++i) sum += std::abs(u[i] - x[i]);
  return sum;
}

double l2_distance(const Image& u, const Image& x) {
  require_same_shape(u, x, "l2_distance");
  double sum = 0;
  for (int i = 0; i < u.size(); ++i) {
    const double d = u[i] - x[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double linf_distance(const Image& u, const Image& x) {
  require_same_shape(u, x, "linf_distance");
  double best = 0;
  for (int i = 0; i < u.size(); ++i) {
    best = std::max(best, std::abs(u[i] - x[i]));
  }
  return best;
}

}  // namespace plb
