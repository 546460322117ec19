#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plb/network.hpp"
#include "plb/tensor.hpp"

namespace plb {

// How the misclassified starting point is drawn. Auto picks uniform for the
// counting-type metrics (L0, Linf) and the Gaussian ladder otherwise.
enum class InitNoise { Auto, Gaussian, Uniform };

struct AttackConfig {
  Metric metric = Metric::L2;
  int iterations = 900;        // K
  int inner_iterations = 30;   // K_inner: lambda updates once per block
  double lambda0 = 0.1;
  double beta = 0.75;          // lambda decay per block
  double step = 0.1;           // h, gradient step on the barrier term
  double mu = 1.0;             // prox weight
  int k_top = 1;               // barrier uses k-th largest non-true logit
  bool use_softmax = false;    // barrier on softmax outputs instead of logits
  int backtrack_limit = 10;    // halvings of t before falling back
  InitNoise init_noise = InitNoise::Auto;
  int max_init_tries = 10;     // draws per noise level before giving up
  // Independent initializations; the smallest-distance successful run wins.
  // 1 reproduces the single-run algorithm exactly; higher values trade
  // compute for an escape from bad initialization basins.
  int restarts = 1;
  // Optimize with the l1 prox while still scoring in l0 (useful at scale
  // where the hard threshold is too aggressive); off by default.
  bool l0_via_l1 = false;
  std::uint64_t seed = 0;

  // Defaults per metric: TV runs a shorter, heavier-weighted schedule.
  static AttackConfig defaults_for(Metric metric);
};

struct Distances {
  double l0 = 0;
  double l1 = 0;
  double l2 = 0;
  double linf = 0;
  double tv = 0;
};

Distances measure_distances(const Image& adversarial, const Image& original);

struct TraceEntry {
  int iteration = 0;
  double lambda = 0;
  double barrier = 0;        // F(u^k) before the step
  double best_distance = 0;  // m(w^k; x) under the attack metric
};

struct AttackResult {
  bool success = false;
  Image adversarial;        // w^K, the best iterate (original on failure)
  Distances distances;      // measured from the final image
  double init_distance = 0; // m(u^0; x); 0 when initialization failed
  int iterations = 0;       // outer iterations executed
  int backtracks = 0;       // total backtracking halvings across the run
  std::vector<TraceEntry> trace;
};

// Draws a starting point inside [0,1]^n whose barrier is strictly positive
// (so the log term is defined). Returns x itself when it is already
// misclassified. Gaussian mode walks an escalating sigma ladder
// (0.0625, 0.125, 0.25, 0.5, 1, 2, 4); each rung first probes the point
// sigma * sqrt(n) along the steepest cross-entropy ascent direction — one
// forward pass aimed at the class region where the loss grows fastest, which
// usually holds the nearest boundary — and then makes `attempts` random draws
// at that sigma. Starting small biases the accepted point toward directions
// where the decision boundary is genuinely close. Uniform samples the box
// directly `attempts` times, falling back to the ladder when every uniform
// draw lands on the true class. Returns nullopt when every attempt
// classifies as y.
std::optional<Image> initialize_misclassified(const Network& net,
                                              const Image& x, int y,
                                              Metric metric,
                                              std::uint64_t seed,
                                              int k_top = 1,
                                              bool use_softmax = false,
                                              int attempts = 10,
                                              InitNoise noise = InitNoise::Auto);

// Walks from candidate toward fallback (t = 1, 1/2, ..., 2^-limit) until the
// point misclassifies; returns fallback itself when no step qualifies.
// halvings reports how many times t was cut for this call.
Image backtrack_to_misclassified(const Network& net, const Image& candidate,
                                 const Image& fallback, int y, int k_top,
                                 bool use_softmax, int limit, int* halvings);

// Proximal log-barrier attack on example (x, y). An x the model already
// misclassifies comes back unchanged with success=true and zero distances;
// a failed initialization comes back as success=false. With restarts > 1
// the attack reruns from deterministically derived seeds and reports the
// best successful run (its trace, iterations, and backtracks).
AttackResult prox_log_barrier_attack(const Network& net, const Image& x,
                                     int y, const AttackConfig& cfg);

// Projected gradient ascent on cross-entropy inside a metric ball, as the
// comparison baseline. Only L2 and Linf balls are supported. epsilon = 0
// degenerates to returning x (success iff x is already misclassified).
struct PgdConfig {
  Metric metric = Metric::Linf;
  double epsilon = 0.1;
  double step = 0.01;
  int iterations = 40;
};

struct PgdResult {
  bool success = false;
  Image adversarial;
  Distances distances;
};

PgdResult pgd_attack(const Network& net, const Image& x, int y,
                     const PgdConfig& cfg);

// One-step signed-gradient attack: PGD with a single full-size step.
PgdResult fgsm_attack(const Network& net, const Image& x, int y,
                      double epsilon);

// Smallest epsilon in [lo, hi] where pgd_attack succeeds, by bisection.
// Returns hi when even hi fails.
double pgd_minimal_epsilon(const Network& net, const Image& x, int y,
                           Metric metric, double lo, double hi,
                           const PgdConfig& base, int bisect_steps = 20);

}  // namespace plb
