#include "cqrl/agent_config.hpp"

#include <algorithm>

namespace cqrl {

void AgentConfig::validate() const {
  const auto& names = algorithm_names();
  if (std::find(names.begin(), names.end(), algorithm) == names.end())
    throw Error("unknown algorithm '" + algorithm + "'");
  if (gamma < 0.0f || gamma > 1.0f) throw Error("agent config: gamma outside [0,1]");
  if (n_quantiles < 1 || batch_size < 1 || replay_capacity < 1 || warmup_steps < 1 ||
      hard_target_interval < 1 || hidden < 1)
    throw Error("agent config: counts must be positive");
  if (lr <= 0.0f) throw Error("agent config: learning rate must be positive");
  if (reward_scale <= 0.0f) throw Error("agent config: reward scale must be positive");
  if (eps_start < 0.0f || eps_start > 1.0f || eps_final < 0.0f || eps_final > 1.0f)
    throw Error("agent config: epsilon outside [0,1]");
}

bool AgentConfig::is_sac() const { return algorithm.rfind("sac") != std::string::npos; }

int AgentConfig::effective_n() const {
  return (algorithm == "dqn" || algorithm == "sac") ? 1 : n_quantiles;
}

AggregationMode AgentConfig::mode() const {
  return algorithm.rfind("cqr-", 0) == 0 ? AggregationMode::kConservative
                                         : AggregationMode::kMean;
}

EvaluationVariant AgentConfig::variant() const {
  return algorithm.size() > 4 && algorithm.rfind("-tau") == algorithm.size() - 4
             ? EvaluationVariant::kTrajectory
             : EvaluationVariant::kPolicy;
}

float AgentConfig::epsilon_at(long step, long total_steps) const {
  const double span = std::max(1.0, eps_fraction * static_cast<double>(total_steps));
  const double frac = std::min(1.0, static_cast<double>(step) / span);
  return static_cast<float>(eps_start + (eps_final - eps_start) * frac);
}

namespace {
constexpr double kVfChoices[] = {-2.0, 0.0, 4.0, 8.0, 14.0};
constexpr double kLfChoices[] = {-1.0, 0.0, 1.0};
}  // namespace

int dqn_action_count() { return 15; }

TrajectoryAction dqn_action(int index) {
  if (index < 0 || index >= dqn_action_count()) throw Error("dqn_action: index out of range");
  return {kVfChoices[index / 3], kLfChoices[index % 3]};
}

ActionRange sac_vf_range() { return {-4.0, 14.0}; }
ActionRange sac_lf_range() { return {-1.5, 1.5}; }

}  // namespace cqrl
