#pragma once

#include <span>
#include <vector>

#include "plb/prox.hpp"
#include "plb/tensor.hpp"

namespace plb {

// Forward differences per channel. dx holds the row-direction differences
// v[i+1,j] - v[i,j] (last row zero); dy the column-direction differences
// v[i,j+1] - v[i,j] (last column zero).
struct GradientField {
  Image dx;
  Image dy;
};

GradientField finite_difference(const Image& v);

// Anisotropic total variation: sum of |dx| + |dy| over all channels.
double tv_seminorm(const Image& v);

// Exact minimizer of 0.5*||u - v||^2 + mu * sum_i |u_{i+1} - u_i|
// (direct non-iterative method).
std::vector<double> tv_prox_1d(std::span<const double> v, double mu);

struct TvProxOptions {
  double tol = 1e-8;    // linf change between sweeps
  int max_sweeps = 200;
};

struct TvProxReport {
  bool converged = true;
  int sweeps = 0;
};

// Prox of mu*||. - x||_TV by Dykstra splitting between exact row and column
// 1-D solves, per channel. On sweep exhaustion returns the best iterate and
// clears report->converged.
Image prox_tv_dist(const Image& z, const ProxParams& p,
                   const TvProxOptions& opt = {},
                   TvProxReport* report = nullptr);

}  // namespace plb
