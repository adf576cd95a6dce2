#pragma once

#include <span>
#include <vector>

#include "cqrl/quantile.hpp"

namespace cqrl {

enum class TerminalKind { kNone = 0, kCollision = 1, kGoal = 2, kTimeout = 3 };

// Timeout terminations are episode truncation, not environment dynamics, so
// they bootstrap like non-terminal transitions.
inline bool bootstraps(TerminalKind k) {
  return k == TerminalKind::kNone || k == TerminalKind::kTimeout;
}

// Per-transition distributional targets for the DQN family.
//
// next_quantiles: [batch, num_actions, n] quantile table of the target net at
// s'. policy variant: a* = argmax_a aggregate(row a) and target_j = r +
// gamma * q_j(s',a*); trajectory variant uses the stored action instead.
// Non-bootstrapping terminals give target_j = r.
std::vector<float> dqn_targets(std::span<const float> next_quantiles, int batch,
                               int num_actions, int n, std::span<const float> rewards,
                               std::span<const TerminalKind> terminals,
                               std::span<const int> actions, AggregationMode mode,
                               EvaluationVariant variant, float gamma);

// Per-transition distributional targets for the SAC family.
//
// next_quantiles: [batch, n] quantiles of the target critic at (s', a') for
// the policy variant, or at (s', a_stored) for the trajectory variant (the
// caller evaluates the right pair). policy: target_j = r + gamma * (q_j -
// alpha * log_pi); trajectory: target_j = r + gamma * q_j with no entropy
// term. Non-bootstrapping terminals give target_j = r.
std::vector<float> sac_targets(std::span<const float> next_quantiles, int batch, int n,
                               std::span<const float> rewards,
                               std::span<const TerminalKind> terminals,
                               std::span<const float> next_log_pi, EvaluationVariant variant,
                               float alpha, float gamma);

}  // namespace cqrl
