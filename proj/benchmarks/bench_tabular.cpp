#include <benchmark/benchmark.h>

#include "cqrl/cliff.hpp"
#include "cqrl/tabular.hpp"

using namespace cqrl;

static void BM_CliffConservativeVI(benchmark::State& state) {
  CliffConfig cfg;
  cfg.p = 0.1;
  const MdpSpec mdp = cliff_as_mdp(cfg);
  for (auto _ : state) {
    auto res = tabular_qr_value_iteration(mdp, 32, AggregationMode::kConservative);
    benchmark::DoNotOptimize(res.z[0]);
  }
}
BENCHMARK(BM_CliffConservativeVI);

static void BM_CliffExpectedVI(benchmark::State& state) {
  CliffConfig cfg;
  cfg.p = 0.1;
  const MdpSpec mdp = cliff_as_mdp(cfg);
  for (auto _ : state) {
    auto res = expected_value_iteration(mdp);
    benchmark::DoNotOptimize(res.q[0]);
  }
}
BENCHMARK(BM_CliffExpectedVI);
