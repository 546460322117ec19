#include "plb/attack.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "plb/prox.hpp"
#include "plb/tv.hpp"

namespace plb {

AttackConfig AttackConfig::defaults_for(Metric metric) {
  AttackConfig cfg;
  cfg.metric = metric;
  if (metric == Metric::TV) {
    // The TV prox dominates the per-iteration cost, so the schedule is
    // shorter and the prox weight heavier.
    cfg.iterations = 200;
    cfg.inner_iterations = 20;
    cfg.mu = 5.0;
  }
  return cfg;
}

Distances measure_distances(const Image& adversarial, const Image& original) {
  Distances d;
  d.l0 = l0_distance(adversarial, original);
  d.l1 = l1_distance(adversarial, original);
  d.l2 = l2_distance(adversarial, original);
  d.linf = linf_distance(adversarial, original);
  d.tv = tv_seminorm(adversarial - original);
  return d;
}

namespace {

bool misclassified(const Network& net, const Image& u, int y, int k_top,
                   bool use_softmax) {
  return barrier_value(forward(net, u), y, k_top, use_softmax) > 0;
}

constexpr double kSigmaLadder[] = {0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0};

Image gaussian_candidate(const Image& x, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  Image c = x;
  for (double& v : c.data()) v += noise(rng);
  return box_project(c);
}

Image uniform_candidate(const Shape& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Image c(shape);
  for (double& v : c.data()) v = unit(rng);
  return c;
}

// Unit direction of steepest cross-entropy ascent at x, or nullopt when the
// gradient vanishes (e.g. a constant network).  Random noise reaches *a*
// misclassified region; this direction points at the one where the loss grows
// fastest, which is usually the region containing the nearest boundary.
std::optional<Image> ascent_direction(const Network& net, const Image& x,
                                      int y) {
  Image g = grad_cross_entropy(net, x, y).gradient;
  double norm_sq = 0.0;
  for (double v : g.data()) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  if (!(norm > 1e-12)) return std::nullopt;
  for (double& v : g.data()) v /= norm;
  return g;
}

}  // namespace

std::optional<Image> initialize_misclassified(const Network& net,
                                              const Image& x, int y,
                                              Metric metric,
                                              std::uint64_t seed, int k_top,
                                              bool use_softmax, int attempts,
                                              InitNoise noise) {
  if (attempts < 1) {
    throw std::invalid_argument("initialize_misclassified: attempts must be >= 1");
  }
  if (misclassified(net, x, y, k_top, use_softmax)) return x;

  if (noise == InitNoise::Auto) {
    noise = (metric == Metric::L0 || metric == Metric::Linf)
                ? InitNoise::Uniform
                : InitNoise::Gaussian;
  }
  std::mt19937_64 rng(seed);
  if (noise == InitNoise::Uniform) {
    for (int a = 0; a < attempts; ++a) {
      Image c = uniform_candidate(x.shape(), rng);
      if (misclassified(net, c, y, k_top, use_softmax)) return c;
    }
  }
  // Escalating noise: each rung of the sigma ladder first probes the point
  // sigma * sqrt(n) along the steepest-ascent direction (matching the
  // expected norm of a Gaussian draw at that rung), then makes `attempts`
  // random draws.  The deterministic probe costs one forward pass and lands
  // in the fastest-growing loss region; the random draws remain as the
  // fallback for boundaries the gradient direction misses.  Uniform mode
  // falls through to the ladder so a hard image still gets the strongest
  // initializer before the attack gives up.
  const std::optional<Image> ascent = ascent_direction(net, x, y);
  const double root_n = std::sqrt(static_cast<double>(x.size()));
  for (double sigma : kSigmaLadder) {
    if (ascent.has_value()) {
      Image c = box_project(x + (sigma * root_n) * *ascent);
      if (misclassified(net, c, y, k_top, use_softmax)) return c;
    }
    for (int a = 0; a < attempts; ++a) {
      Image c = gaussian_candidate(x, sigma, rng);
      if (misclassified(net, c, y, k_top, use_softmax)) return c;
    }
  }
  return std::nullopt;
}

Image backtrack_to_misclassified(const Network& net, const Image& candidate,
                                 const Image& fallback, int y, int k_top,
                                 bool use_softmax, int limit, int* halvings) {
  if (!(candidate.shape() == fallback.shape())) {
    throw std::invalid_argument("backtrack_to_misclassified: shape mismatch");
  }
  if (limit < 0) {
    throw std::invalid_argument("backtrack_to_misclassified: negative limit");
  }
  double t = 1.0;
  for (int halved = 0; halved <= limit; ++halved) {
    Image point = fallback + t * (candidate - fallback);
    if (misclassified(net, point, y, k_top, use_softmax)) {
      if (halvings != nullptr) *halvings = halved;
      return point;
    }
    t *= 0.5;
  }
  if (halvings != nullptr) *halvings = limit;
  return fallback;
}

namespace {

// Deterministic per-restart seed: restart 0 uses the configured seed
// unchanged (so restarts = 1 reproduces the single-run attack bit for bit),
// later restarts get splitmix64-style derived streams.
std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  if (restart == 0) return seed;
  std::uint64_t z =
      seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(restart);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

AttackResult attack_from_one_init(const Network& net, const Image& x, int y,
                                  const AttackConfig& cfg,
                                  std::uint64_t seed) {
  AttackResult res;
  res.adversarial = x;
  res.distances = measure_distances(x, x);

  std::optional<Image> start = initialize_misclassified(
      net, x, y, cfg.metric, seed, cfg.k_top, cfg.use_softmax,
      cfg.max_init_tries, cfg.init_noise);
  if (!start.has_value()) return res;

  Image u = *start;
  Image best = u;
  double best_dist = metric_eval(cfg.metric, best, x);
  res.init_distance = best_dist;
  if (best_dist == 0.0) {
    // Typically x itself was already misclassified; no perturbation can
    // measure less than zero, so the loop has nothing to improve.
    res.success = true;
    res.adversarial = best;
    res.distances = measure_distances(best, x);
    return res;
  }
  // The l0 "norm" may be relaxed to l1 inside the optimizer while the
  // distances keep scoring in l0.
  const Metric prox_metric =
      (cfg.metric == Metric::L0 && cfg.l0_via_l1) ? Metric::L1 : cfg.metric;
  const ProxParams prox_params{cfg.mu, x};

  res.trace.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int k = 0; k < cfg.iterations; ++k) {
    const double lambda =
        cfg.lambda0 * std::pow(cfg.beta, static_cast<double>(k / cfg.inner_iterations));
    BarrierGradient bg =
        grad_log_barrier(net, u, y, cfg.k_top, cfg.use_softmax);

    Image z = u - (cfg.step * lambda) * bg.gradient;
    Image v = box_project(metric_prox(prox_metric, z, prox_params));

    int halved = 0;
    u = backtrack_to_misclassified(net, v, u, y, cfg.k_top, cfg.use_softmax,
                                   cfg.backtrack_limit, &halved);
    res.backtracks += halved;

    const double dist = metric_eval(cfg.metric, u, x);
    if (dist < best_dist) {
      best_dist = dist;
      best = u;
    }
    res.trace.push_back({k + 1, lambda, bg.barrier, best_dist});
  }

  res.iterations = cfg.iterations;
  res.success = misclassified(net, best, y, cfg.k_top, cfg.use_softmax);
  res.adversarial = best;
  res.distances = measure_distances(best, x);
  return res;
}

}  // namespace

AttackResult prox_log_barrier_attack(const Network& net, const Image& x,
                                     int y, const AttackConfig& cfg) {
  if (cfg.iterations < 1 || cfg.inner_iterations < 1) {
    throw std::invalid_argument("attack: iteration counts must be >= 1");
  }
  if (!(cfg.lambda0 > 0) || !(cfg.beta > 0) || cfg.beta > 1 ||
      !(cfg.step > 0) || !(cfg.mu > 0) || cfg.backtrack_limit < 0 ||
      cfg.max_init_tries < 1 || cfg.restarts < 1) {
    throw std::invalid_argument("attack: bad configuration");
  }

  AttackResult best =
      attack_from_one_init(net, x, y, cfg, restart_seed(cfg.seed, 0));
  for (int r = 1; r < cfg.restarts; ++r) {
    // A zero-distance success (x itself misclassified) cannot be improved.
    if (best.success && metric_eval(cfg.metric, best.adversarial, x) == 0.0) {
      break;
    }
    AttackResult candidate =
        attack_from_one_init(net, x, y, cfg, restart_seed(cfg.seed, r));
    const bool better =
        candidate.success &&
        (!best.success ||
         metric_eval(cfg.metric, candidate.adversarial, x) <
             metric_eval(cfg.metric, best.adversarial, x));
    if (better) best = std::move(candidate);
  }
  return best;
}

PgdResult pgd_attack(const Network& net, const Image& x, int y,
                     const PgdConfig& cfg) {
  if (cfg.metric != Metric::L2 && cfg.metric != Metric::Linf) {
    throw std::invalid_argument("pgd_attack: only l2 and linf balls supported");
  }
  if (!(cfg.epsilon >= 0) || !(cfg.step >= 0) || cfg.iterations < 1) {
    throw std::invalid_argument("pgd_attack: bad configuration");
  }

  PgdResult res;
  res.adversarial = x;
  if (predict(net, x) != y) {
    res.success = true;
    res.distances = measure_distances(x, x);
    return res;
  }

  Image u = x;
  for (int k = 0; k < cfg.iterations; ++k) {
    const Image g = grad_cross_entropy(net, u, y).gradient;
    if (cfg.metric == Metric::Linf) {
      for (int i = 0; i < u.size(); ++i) {
        u[i] += cfg.step * (g[i] > 0 ? 1.0 : (g[i] < 0 ? -1.0 : 0.0));
      }
    } else {
      double norm = 0;
      for (int i = 0; i < g.size(); ++i) norm += g[i] * g[i];
      norm = std::sqrt(norm);
      if (norm == 0) break;
      u += (cfg.step / norm) * g;
    }

    Image d = u - x;
    if (cfg.metric == Metric::Linf) {
      for (double& v : d.data()) v = std::clamp(v, -cfg.epsilon, cfg.epsilon);
    } else {
      double norm = 0;
      for (double v : d.data()) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > cfg.epsilon) d *= cfg.epsilon / norm;
    }
    u = box_project(x + d);
    if (predict(net, u) != y) break;
  }

  res.success = predict(net, u) != y;
  res.adversarial = u;
  res.distances = measure_distances(u, x);
  return res;
}

PgdResult fgsm_attack(const Network& net, const Image& x, int y,
                      double epsilon) {
  PgdConfig cfg;
  cfg.metric = Metric::Linf;
  cfg.epsilon = epsilon;
  cfg.step = epsilon;
  cfg.iterations = 1;
  return pgd_attack(net, x, y, cfg);
}

double pgd_minimal_epsilon(const Network& net, const Image& x, int y,
                           Metric metric, double lo, double hi,
                           const PgdConfig& base, int bisect_steps) {
  if (!(lo >= 0) || !(hi > lo)) {
    throw std::invalid_argument("pgd_minimal_epsilon: need 0 <= lo < hi");
  }
  if (bisect_steps < 1) {
    throw std::invalid_argument("pgd_minimal_epsilon: bisect_steps must be >= 1");
  }
  if (!(base.epsilon > 0) || !(base.step > 0)) {
    throw std::invalid_argument(
        "pgd_minimal_epsilon: base config needs positive epsilon and step");
  }
  // The step size scales with the ball so narrow balls are still explored.
  const double step_ratio = base.step / base.epsilon;
  auto succeeds = [&](double eps) {
    PgdConfig cfg = base;
    cfg.metric = metric;
    cfg.epsilon = eps;
    cfg.step = eps * step_ratio;
    return pgd_attack(net, x, y, cfg).success;
  };

  if (!succeeds(hi)) return hi;
  if (succeeds(lo)) return lo;

  double bad = lo, good = hi;
  for (int k = 0; k < bisect_steps; ++k) {
    const double mid = 0.5 * (bad + good);
    if (mid <= bad || mid >= good) break;
    if (succeeds(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  return good;
}

}  // namespace plb
