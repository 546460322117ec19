#pragma once

#include <functional>
#include <span>
#include <vector>

#include "plb/tensor.hpp"

namespace plb {

// Parameters of Prox_{mu m(.;x)}: prox weight and the clean anchor image.
struct ProxParams {
  double mu = 1.0;
  Image anchor;
};

// sign(s) * max(|s| - mu, 0), componentwise.
std::vector<double> soft_threshold(std::span<const double> s, double mu);

// s where |s| > alpha strictly, else 0.
std::vector<double> hard_threshold(std::span<const double> s, double alpha);

// Euclidean projection onto {u : ||u||_1 <= radius}, sort-based, O(n log n).
std::vector<double> project_l1_ball(std::span<const double> v, double radius);

// Euclidean projection onto {u : ||u||_2 <= radius}.
std::vector<double> project_l2_ball(std::span<const double> v, double radius);

// Closed-form proximal maps of mu*||. - x||_p, anchored at p.anchor.
Image prox_l1_dist(const Image& z, const ProxParams& p);
Image prox_l2_dist(const Image& z, const ProxParams& p);
Image prox_linf_dist(const Image& z, const ProxParams& p);
Image prox_l0_dist(const Image& z, const ProxParams& p);

// Dispatch on the metric tag; Metric::TV routes to prox_tv_dist.
Image metric_prox(Metric metric, const Image& z, const ProxParams& p);

// Composite problem min f(v) + g(v) with smooth f and prox-friendly g.
struct CompositeProblem {
  std::function<double(std::span<const double>)> smooth_value;
  std::function<std::vector<double>(std::span<const double>)> smooth_gradient;
  // Prox_{tau g}(v).
  std::function<std::vector<double>(std::span<const double>, double)> prox;
  // g(v); needed to report the composite objective along the iterates.
  std::function<double(std::span<const double>)> nonsmooth_value;
  double lipschitz_bound = 1.0;
};

struct ProxGradResult {
  std::vector<double> minimizer;
  // f(x^k) + g(x^k) for k = 0..iters; non-increasing for step <= 1/L.
  std::vector<double> objective_trace;
};

// Fixed-step proximal gradient iteration
//   x^{k+1} = Prox_{step g}(x^k - step * grad f(x^k)).
// Requires 0 < step <= 1/lipschitz_bound and iters >= 1. Throws
// std::runtime_error naming the iteration if the objective turns non-finite.
ProxGradResult prox_gradient_solve(const CompositeProblem& prob,
                                   std::span<const double> x0, double step,
                                   int iters);

}  // namespace plb
