#pragma once

#include "cqrl/agents.hpp"
#include "cqrl/metrics.hpp"
#include "cqrl/planners.hpp"
#include "cqrl/scenario.hpp"

namespace cqrl {

struct EvalOutput {
  std::vector<TraceRow> trace;  // completed episodes only
  MetricsRow metrics;
};

// Runs `budget` decision steps in test mode: deterministic actions, fixed
// difficulty, metrics over all episodes completed within the budget.
EvalOutput evaluate_agent(LearningAgent& agent, ScenarioKind kind, long budget, uint64_t seed,
                          int difficulty = 5, const SimParams& params = {},
                          const ScenarioConfig& scfg = {});

EvalOutput evaluate_planner(PlannerKind planner, ScenarioKind kind, long budget, uint64_t seed,
                            int difficulty = 5, const SimParams& params = {},
                            const ScenarioConfig& scfg = {});

}  // namespace cqrl
