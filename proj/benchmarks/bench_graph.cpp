#include <benchmark/benchmark.h>

#include "cqrl/networks.hpp"
#include "cqrl/quantile.hpp"

using namespace cqrl;

static void BM_QNetForwardBatch(benchmark::State& state) {
  const int obs_dim = 1600, B = 64;
  QNetwork net = make_q_network(obs_dim, 256, 15, 32, B, 1);
  Array obs({B, obs_dim});
  Rng rng(2);
  for (auto& v : obs.data) v = static_cast<float>(rng.uniform(-1, 1));
  net.batch.set_input(net.batch_obs, obs);
  for (auto _ : state) {
    net.batch.run();
    benchmark::DoNotOptimize(net.batch.value(net.batch_out).data[0]);
  }
}
BENCHMARK(BM_QNetForwardBatch);

static void BM_QNetTrainStepMath(benchmark::State& state) {
  // forward + seeded backward, the per-step training kernel
  const int obs_dim = 1600, B = 64;
  QNetwork net = make_q_network(obs_dim, 256, 15, 32, B, 1);
  Array obs({B, obs_dim});
  Rng rng(2);
  for (auto& v : obs.data) v = static_cast<float>(rng.uniform(-1, 1));
  net.batch.set_input(net.batch_obs, obs);
  Array seed({B, 15 * 32});
  for (auto& v : seed.data) v = static_cast<float>(rng.uniform(-0.01, 0.01));
  for (auto _ : state) {
    net.batch.run();
    net.params->zero_grads();
    net.batch.backward(net.batch_out, seed);
    benchmark::DoNotOptimize(net.params->grad(0).data[0]);
  }
}
BENCHMARK(BM_QNetTrainStepMath);
