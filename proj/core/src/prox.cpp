#include "plb/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "plb/tv.hpp"

namespace plb {

namespace {

void require_weight(double mu, const char* what) {
  if (!(mu > 0) || !std::isfinite(mu)) {
    throw std::invalid_argument(std::string(what) +
                                ": prox weight must be positive and finite");
  }
}

void require_anchor(const Image& z, const ProxParams& p, const char* what) {
  require_weight(p.mu, what);
  if (!(p.anchor.shape() == z.shape())) {
    throw std::invalid_argument(std::string(what) +
                                ": anchor shape does not match input");
  }
}

}  // namespace

std::vector<double> soft_threshold(std::span<const double> s, double mu) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double mag = std::abs(s[i]) - mu;
    out[i] = mag > 0 ? std::copysign(mag, s[i]) : 0.0;
  }
  return out;
}

std::vector<double> hard_threshold(std::span<const double> s, double alpha) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = std::abs(s[i]) > alpha ? s[i] : 0.0;
  }
  return out;
}

std::vector<double> project_l1_ball(std::span<const double> v, double radius) {
  if (!(radius > 0)) {
    throw std::invalid_argument("project_l1_ball: radius must be positive");
  }
  double norm = 0;
  for (double x : v) norm += std::abs(x);
  std::vector<double> out(v.begin(), v.end());
  if (norm <= radius) return out;

  // Sort |v| descending and find the largest k whose thresholded prefix
  // still exhausts the budget; then shrink every component toward zero by
  // the resulting threshold theta.
  std::vector<double> mag(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
  std::sort(mag.begin(), mag.end(), std::greater<>());

  double prefix = 0;
  double theta = 0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    prefix += mag[k];
    const double candidate = (prefix - radius) / static_cast<double>(k + 1);
    if (mag[k] - candidate > 0) {
      theta = candidate;
    } else {
      break;
    }
  }
  for (double& x : out) {
    const double shrunk = std::abs(x) - theta;
    x = shrunk > 0 ? std::copysign(shrunk, x) : 0.0;
  }
  return out;
}

std::vector<double> project_l2_ball(std::span<const double> v, double radius) {
  if (!(radius > 0)) {
    throw std::invalid_argument("project_l2_ball: radius must be positive");
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  std::vector<double> out(v.begin(), v.end());
  if (norm > radius) {
    const double scale = radius / norm;
    for (double& x : out) x *= scale;
  }
  return out;
}

Image prox_l1_dist(const Image& z, const ProxParams& p) {
  require_anchor(z, p, "prox_l1_dist");
  Image d = z - p.anchor;
  std::vector<double> t = soft_threshold(d.data(), p.mu);
  return p.anchor + Image(z.shape(), std::move(t));
}

Image prox_l2_dist(const Image& z, const ProxParams& p) {
  require_anchor(z, p, "prox_l2_dist");
  // Moreau: prox of mu*||.||_2 shrinks the offset to zero once inside the
  // ball of radius mu, otherwise shortens it by mu along its direction.
  Image d = z - p.anchor;
  double norm = 0;
  for (double v : d.data()) norm += v * v;
  norm = std::sqrt(norm);
  if (norm <= p.mu) return p.anchor;
  const double scale = 1.0 - p.mu / norm;
  return p.anchor + scale * d;
}

Image prox_linf_dist(const Image& z, const ProxParams& p) {
  require_anchor(z, p, "prox_linf_dist");
  // Moreau decomposition against the dual norm: subtract mu times the
  // l1-ball projection of the scaled offset.
  Image d = z - p.anchor;
  Image scaled = (1.0 / p.mu) * d;
  std::vector<double> proj = project_l1_ball(scaled.data(), 1.0);
  Image out = z;
  for (int i = 0; i < out.size(); ++i) out[i] -= p.mu * proj[i];
  return out;
}

Image prox_l0_dist(const Image& z, const ProxParams& p) {
  require_anchor(z, p, "prox_l0_dist");
  Image d = z - p.anchor;
  std::vector<double> t = hard_threshold(d.data(), std::sqrt(2.0 * p.mu));
  return p.anchor + Image(z.shape(), std::move(t));
}

Image metric_prox(Metric metric, const Image& z, const ProxParams& p) {
  switch (metric) {
    case Metric::L0: return prox_l0_dist(z, p);
    case Metric::L1: return prox_l1_dist(z, p);
    case Metric::L2: return prox_l2_dist(z, p);
    case Metric::Linf: return prox_linf_dist(z, p);
    case Metric::TV: return prox_tv_dist(z, p);
  }
  throw std::invalid_argument("metric_prox: unknown metric");
}

ProxGradResult prox_gradient_solve(const CompositeProblem& prob,
                                   std::span<const double> x0, double step,
                                   int iters) {
  if (!prob.smooth_value || !prob.smooth_gradient || !prob.prox ||
      !prob.nonsmooth_value) {
    throw std::invalid_argument("prox_gradient_solve: incomplete problem");
  }
  if (iters < 1) {
    throw std::invalid_argument("prox_gradient_solve: iters must be >= 1");
  }
  // The monotone-descent guarantee needs step*L <= 1; allow one ulp of slack
  // so callers passing exactly 1/lipschitz_bound are not rejected.
  if (!(step > 0) || step * prob.lipschitz_bound > 1.0 + 1e-12) {
    throw std::invalid_argument(
        "prox_gradient_solve: step must lie in (0, 1/lipschitz_bound]");
  }

  ProxGradResult res;
  res.minimizer.assign(x0.begin(), x0.end());
  res.objective_trace.reserve(static_cast<std::size_t>(iters) + 1);
  auto objective = [&](std::span<const double> v) {
    return prob.smooth_value(v) + prob.nonsmooth_value(v);
  };
  res.objective_trace.push_back(objective(res.minimizer));

  for (int k = 0; k < iters; ++k) {
    std::vector<double> g = prob.smooth_gradient(res.minimizer);
    if (g.size() != res.minimizer.size()) {
      throw std::runtime_error("prox_gradient_solve: gradient size mismatch");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = res.minimizer[i] - step * g[i];
    }
    res.minimizer = prob.prox(g, step);
    const double value = objective(res.minimizer);
    if (!std::isfinite(value)) {
      throw std::runtime_error(
          "prox_gradient_solve: objective became non-finite at iteration " +
          std::to_string(k + 1));
    }
    res.objective_trace.push_back(value);
  }
  return res;
}

}  // namespace plb
