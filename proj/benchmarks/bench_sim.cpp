#include <benchmark/benchmark.h>

#include "cqrl/observation.hpp"
#include "cqrl/scenario.hpp"

using namespace cqrl;

static void BM_RaycastOgm(benchmark::State& state) {
  SimParams params;
  Rng rng(4);
  WorldState w = spawn_scenario(ScenarioKind::kCurvedRoad, 5, rng, params);
  for (auto _ : state) {
    Ogm g = raycast_ogm(w, params);
    benchmark::DoNotOptimize(g.cells[0]);
  }
}
BENCHMARK(BM_RaycastOgm);

static void BM_EnvDecisionStep(benchmark::State& state) {
  SimParams params;
  Rng rng(5);
  WorldState w = spawn_scenario(ScenarioKind::kCurvedRoad, 5, rng, params);
  Ogm prev = raycast_ogm(w, params);
  for (auto _ : state) {
    if (w.done) {
      w = spawn_scenario(ScenarioKind::kCurvedRoad, 5, rng, params);
    }
    step_world(w, {8.0, 0.0}, params);
    Ogm g = raycast_ogm(w, params);
    auto road = road_mask(w, params, g);
    Observation obs = build_observation(g, prev, road, w.v, params.v_lim);
    prev = std::move(g);
    benchmark::DoNotOptimize(obs.data[0]);
  }
}
BENCHMARK(BM_EnvDecisionStep);
