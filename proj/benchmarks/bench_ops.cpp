// Microbenchmarks for the operators that dominate attack runtime: the prox
// maps (the linf case hides an l1-ball projection), the TV prox, and the
// network forward/backward passes behind every barrier-gradient step.

#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "plb/attack.hpp"
#include "plb/network.hpp"
#include "plb/prox.hpp"
#include "plb/tensor.hpp"
#include "plb/tv.hpp"

namespace {

std::vector<double> random_vector(int n, std::uint64_t seed, double lo,
                                  double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = dist(rng);
  return v;
}

plb::Image random_image(const plb::Shape& shape, std::uint64_t seed,
                        double lo = 0.0, double hi = 1.0) {
  plb::Image u(shape);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& x : u.data()) x = dist(rng);
  return u;
}

void BM_SoftThreshold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<double> v = random_vector(n, 1, -2.0, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plb::soft_threshold(v, 0.3));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SoftThreshold)->Arg(784)->Arg(3072);

void BM_ProjectL1Ball(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<double> v = random_vector(n, 2, -2.0, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plb::project_l1_ball(v, 1.0));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ProjectL1Ball)->Arg(784)->Arg(3072)->Arg(150528);

void BM_MetricProx(benchmark::State& state) {
  const plb::Metric metric = static_cast<plb::Metric>(state.range(0));
  const plb::Shape shape{1, 28, 28};
  const plb::ProxParams params{1.0, random_image(shape, 3)};
  const plb::Image z = random_image(shape, 4, -0.5, 1.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plb::metric_prox(metric, z, params));
  }
}
BENCHMARK(BM_MetricProx)
    ->Arg(static_cast<int>(plb::Metric::L0))
    ->Arg(static_cast<int>(plb::Metric::L1))
    ->Arg(static_cast<int>(plb::Metric::L2))
    ->Arg(static_cast<int>(plb::Metric::Linf));

void BM_TvProx1d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<double> v = random_vector(n, 5, -1.0, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plb::tv_prox_1d(v, 0.4));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_TvProx1d)->Arg(28)->Arg(256)->Arg(4096);

void BM_ProxTvDist(benchmark::State& state) {
  const plb::Shape shape{1, 28, 28};
  const plb::ProxParams params{5.0, random_image(shape, 6)};
  const plb::Image z = random_image(shape, 7, -0.5, 1.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plb::prox_tv_dist(z, params));
  }
}
BENCHMARK(BM_ProxTvDist);

void BM_Forward(benchmark::State& state) {
  const plb::Shape shape{1, 28, 28};
  const plb::Network net = plb::make_mlp(shape, {64}, 10, 8);
  const plb::Image u = random_image(shape, 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plb::forward(net, u));
  }
}
BENCHMARK(BM_Forward);

void BM_BarrierGradient(benchmark::State& state) {
  const plb::Shape shape{1, 28, 28};
  const plb::Network net = plb::make_mlp(shape, {64}, 10, 10);
  // Pick a label the model does not predict so the barrier is positive.
  const plb::Image u = random_image(shape, 11);
  const int y = (plb::predict(net, u) + 1) % net.class_count;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plb::grad_log_barrier(net, u, y));
  }
}
BENCHMARK(BM_BarrierGradient);

void BM_AttackIterationsL2(benchmark::State& state) {
  const plb::Shape shape{1, 28, 28};
  const plb::Network net = plb::make_mlp(shape, {64}, 10, 12);
  const plb::Image u = random_image(shape, 13);
  const int y = plb::predict(net, u);
  plb::AttackConfig cfg = plb::AttackConfig::defaults_for(plb::Metric::L2);
  cfg.iterations = 30;
  cfg.seed = 14;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plb::prox_log_barrier_attack(net, u, y, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.iterations);
}
BENCHMARK(BM_AttackIterationsL2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
