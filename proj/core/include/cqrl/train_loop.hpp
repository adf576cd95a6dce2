#pragma once

#include "cqrl/eval_loop.hpp"
#include "cqrl/run_config.hpp"

namespace cqrl {

struct SeedRunResult {
  uint64_t seed = 0;
  std::string dir;
  MetricsRow eval_metrics;
  std::vector<TraceRow> eval_trace;
};

// One seed: trains, checkpoints every 10% of steps, logs per-step and
// per-1000-step CSVs, then evaluates the final parameters deterministically at
// difficulty 5. Everything lands under `seed_dir`.
SeedRunResult run_training_seed(const RunConfig& cfg, uint64_t seed, const std::string& seed_dir,
                                const SimParams& params = {}, const ScenarioConfig& scfg = {});

// All seeds as independent workers (at most `max_workers` at once; 0 picks
// from the hardware), then per-seed and pooled metrics at the run root.
std::vector<SeedRunResult> run_training(const RunConfig& cfg, int max_workers = 0,
                                        const SimParams& params = {},
                                        const ScenarioConfig& scfg = {});

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cqrl
