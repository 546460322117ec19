#include "plb/tv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace plb {

GradientField finite_difference(const Image& v) {
  const Shape& s = v.shape();
  GradientField g{Image(s, 0.0), Image(s, 0.0)};
  for (int c = 0; c < s.channels; ++c) {
    for (int i = 0; i < s.height; ++i) {
      for (int j = 0; j < s.width; ++j) {
        if (i + 1 < s.height) {
          g.dx.at(c, i, j) = v.at(c, i + 1, j) - v.at(c, i, j);
        }
        if (j + 1 < s.width) {
          g.dy.at(c, i, j) = v.at(c, i, j + 1) - v.at(c, i, j);
        }
      }
    }
  }
  return g;
}

double tv_seminorm(const Image& v) {
  const Shape& s = v.shape();
  double sum = 0;
  for (int c = 0; c < s.channels; ++c) {
    for (int i = 0; i < s.height; ++i) {
      for (int j = 0; j < s.width; ++j) {
        if (i + 1 < s.height) {
          sum += std::abs(v.at(c, i + 1, j) - v.at(c, i, j));
        }
        if (j + 1 < s.width) {
          sum += std::abs(v.at(c, i, j + 1) - v.at(c, i, j));
        }
      }
    }
  }
  return sum;
}

std::vector<double> tv_prox_1d(std::span<const double> v, double mu) {
  if (!(mu >= 0) || !std::isfinite(mu)) {
    throw std::invalid_argument("tv_prox_1d: weight must be >= 0 and finite");
  }
  const int n = static_cast<int>(v.size());
  std::vector<double> out(v.begin(), v.end());
  if (n <= 1 || mu == 0.0) return out;

  // Dynamic programming over the chain. Let M_k(b) be the optimal cost of
  // the first k samples given u_k = b. Then
  //   M_{k+1}(b) = min_c { M_k(c) + mu*|b - c| } + 0.5*(b - v_{k+1})^2,
  // and because M_k is convex the inner minimization simply clamps the
  // derivative of M_k to [-mu, mu]. The derivative is a nondecreasing
  // piecewise-linear function, kept here as a deque of breakpoints with
  // (slope, intercept) jumps; each forward step trims both ends at the
  // clamp crossings tm[k] (derivative = -mu) and tp[k] (derivative = +mu)
  // and appends the next data term. Those crossings are the only
  // back-pointers needed: u_k = clamp(u_{k+1}, tm[k], tp[k]).
  std::vector<double> knot(2 * static_cast<std::size_t>(n));
  std::vector<double> dslope(2 * static_cast<std::size_t>(n));
  std::vector<double> doffs(2 * static_cast<std::size_t>(n));
  std::vector<double> tm(static_cast<std::size_t>(n) - 1);
  std::vector<double> tp(static_cast<std::size_t>(n) - 1);

  // Derivative of M_1 clamped and joined with the second data term. The
  // left scan works with the true (slope, intercept) of the current piece;
  // the right scan keeps them negated so both scans accumulate the same
  // stored jumps while moving inward.
  int l = n - 1;
  int r = n;
  tm[0] = v[0] - mu;
  tp[0] = v[0] + mu;
  knot[l] = tm[0];
  dslope[l] = 1.0;
  doffs[l] = mu - v[0];
  knot[r] = tp[0];
  dslope[r] = -1.0;
  doffs[r] = mu + v[0];
  double afirst = 1.0, bfirst = -mu - v[1];
  double alast = -1.0, blast = -mu + v[1];

  for (int k = 1; k < n - 1; ++k) {
    double alo = afirst, blo = bfirst;
    int lo = l;
    while (lo <= r && alo * knot[lo] + blo <= -mu) {
      alo += dslope[lo];
      blo += doffs[lo];
      ++lo;
    }
    tm[k] = (-mu - blo) / alo;
    l = lo - 1;
    knot[l] = tm[k];

    double ahi = alast, bhi = blast;
    int hi = r;
    while (hi >= l && -(ahi * knot[hi] + bhi) >= mu) {
      ahi += dslope[hi];
      bhi += doffs[hi];
      --hi;
    }
    tp[k] = (mu + bhi) / (-ahi);
    r = hi + 1;
    knot[r] = tp[k];

    dslope[l] = alo;
    doffs[l] = blo + mu;
    dslope[r] = ahi;
    doffs[r] = bhi + mu;
    afirst = 1.0;
    bfirst = -mu - v[k + 1];
    alast = -1.0;
    blast = -mu + v[k + 1];
  }

  // Final sample: the unconstrained minimizer of the last message.
  double alo = afirst, blo = bfirst;
  int lo = l;
  while (lo <= r && alo * knot[lo] + blo <= 0.0) {
    alo += dslope[lo];
    blo += doffs[lo];
    ++lo;
  }
  out[n - 1] = -blo / alo;
  for (int k = n - 2; k >= 0; --k) {
    out[k] = std::clamp(out[k + 1], tm[k], tp[k]);
  }
  return out;
}

namespace {

// Exact prox of mu * (sum of 1-D TVs along every row), channel by channel.
Image prox_rows(const Image& v, double mu) {
  const Shape& s = v.shape();
  if (s.width <= 1) return v;
  Image out = v;
  std::vector<double> line(static_cast<std::size_t>(s.width));
  for (int c = 0; c < s.channels; ++c) {
    for (int i = 0; i < s.height; ++i) {
      for (int j = 0; j < s.width; ++j) line[j] = v.at(c, i, j);
      std::vector<double> solved = tv_prox_1d(line, mu);
      for (int j = 0; j < s.width; ++j) out.at(c, i, j) = solved[j];
    }
  }
  return out;
}

Image prox_cols(const Image& v, double mu) {
  const Shape& s = v.shape();
  if (s.height <= 1) return v;
  Image out = v;
  std::vector<double> line(static_cast<std::size_t>(s.height));
  for (int c = 0; c < s.channels; ++c) {
    for (int j = 0; j < s.width; ++j) {
      for (int i = 0; i < s.height; ++i) line[i] = v.at(c, i, j);
      std::vector<double> solved = tv_prox_1d(line, mu);
      for (int i = 0; i < s.height; ++i) out.at(c, i, j) = solved[i];
    }
  }
  return out;
}

}  // namespace

Image prox_tv_dist(const Image& z, const ProxParams& p,
                   const TvProxOptions& opt, TvProxReport* report) {
  if (!(p.mu > 0) || !std::isfinite(p.mu)) {
    throw std::invalid_argument("prox_tv_dist: weight must be positive");
  }
  if (!(p.anchor.shape() == z.shape())) {
    throw std::invalid_argument("prox_tv_dist: anchor shape mismatch");
  }
  if (!(opt.tol > 0) || opt.max_sweeps < 1) {
    throw std::invalid_argument("prox_tv_dist: bad solver options");
  }

  // The anisotropic seminorm splits into row terms and column terms, each
  // with an exact 1-D prox; Dykstra's correction vectors make the
  // alternation converge to the prox of the sum. Rows go first so that a
  // single-row image reduces to tv_prox_1d on the spot.
  Image x = z - p.anchor;
  Image p_corr(z.shape(), 0.0);
  Image q_corr(z.shape(), 0.0);
  bool converged = false;
  int sweep = 0;
  while (sweep < opt.max_sweeps) {
    ++sweep;
    Image prev = x;
    Image t = x + p_corr;
    Image y = prox_rows(t, p.mu);
    p_corr = t - y;
    Image t2 = y + q_corr;
    x = prox_cols(t2, p.mu);
    q_corr = t2 - x;

    double delta = 0;
    for (int i = 0; i < x.size(); ++i) {
      delta = std::max(delta, std::abs(x[i] - prev[i]));
    }
    if (delta <= opt.tol) {
      converged = true;
      break;
    }
  }
  if (report != nullptr) {
    report->converged = converged;
    report->sweeps = sweep;
  }
  return p.anchor + x;
}

}  // namespace plb
