#include "cqrl/targets.hpp"

#include <cmath>
#include <limits>

namespace cqrl {

std::vector<float> dqn_targets(std::span<const float> next_quantiles, int batch,
                               int num_actions, int n, std::span<const float> rewards,
                               std::span<const TerminalKind> terminals,
                               std::span<const int> actions, AggregationMode mode,
                               EvaluationVariant variant, float gamma) {
  if (next_quantiles.size() != static_cast<size_t>(batch) * num_actions * n)
    throw Error("dqn_targets: quantile table size mismatch");
  std::vector<float> targets(static_cast<size_t>(batch) * n);
  for (int b = 0; b < batch; ++b) {
    float* out = &targets[static_cast<size_t>(b) * n];
    if (!bootstraps(terminals[b])) {
      for (int j = 0; j < n; ++j) out[j] = rewards[b];
      continue;
    }
    int a = actions[b];
    if (a < 0 || a >= num_actions) throw Error("dqn_targets: action index out of range");
    if (variant == EvaluationVariant::kPolicy) {
      int best = 0;
      float best_v = -std::numeric_limits<float>::infinity();
      for (int cand = 0; cand < num_actions; ++cand) {
        const float* q = &next_quantiles[(static_cast<size_t>(b) * num_actions + cand) * n];
        const float v = aggregate(std::span<const float>(q, n), mode);
        if (v > best_v) {
          best_v = v;
          best = cand;
        }
      }
      a = best;
    }
    const float* q = &next_quantiles[(static_cast<size_t>(b) * num_actions + a) * n];
    for (int j = 0; j < n; ++j) out[j] = rewards[b] + gamma * q[j];
  }
  return targets;
}

std::vector<float> sac_targets(std::span<const float> next_quantiles, int batch, int n,
                               std::span<const float> rewards,
                               std::span<const TerminalKind> terminals,
                               std::span<const float> next_log_pi, EvaluationVariant variant,
                               float alpha, float gamma) {
  if (next_quantiles.size() != static_cast<size_t>(batch) * n)
    throw Error("sac_targets: quantile table size mismatch");
  std::vector<float> targets(static_cast<size_t>(batch) * n);
  for (int b = 0; b < batch; ++b) {
    float* out = &targets[static_cast<size_t>(b) * n];
    if (!bootstraps(terminals[b])) {
      for (int j = 0; j < n; ++j) out[j] = rewards[b];
      continue;
    }
    float entropy_term = 0.0f;
    if (variant == EvaluationVariant::kPolicy) {
      if (!std::isfinite(next_log_pi[b])) throw Error("sac_targets: non-finite log-density");
      entropy_term = alpha * next_log_pi[b];
    }
    const float* q = &next_quantiles[static_cast<size_t>(b) * n];
    for (int j = 0; j < n; ++j) out[j] = rewards[b] + gamma * (q[j] - entropy_term);
  }
  return targets;
}

}  // namespace cqrl
