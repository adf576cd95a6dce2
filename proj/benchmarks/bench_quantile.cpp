#include <benchmark/benchmark.h>

#include "cqrl/quantile.hpp"

using namespace cqrl;

static void BM_QuantileHuberLoss(benchmark::State& state) {
  const int n = 32;
  Rng rng(3);
  std::vector<float> pred(n), targets(n);
  const auto taus = quantile_midpoints(n);
  std::vector<float> lev(taus.begin(), taus.end());
  for (auto& v : pred) v = static_cast<float>(rng.uniform(-5, 5));
  for (auto& v : targets) v = static_cast<float>(rng.uniform(-5, 5));
  for (auto _ : state) {
    auto res = quantile_huber_loss(pred, lev, targets, 1.0f);
    benchmark::DoNotOptimize(res.loss);
  }
}
BENCHMARK(BM_QuantileHuberLoss);
