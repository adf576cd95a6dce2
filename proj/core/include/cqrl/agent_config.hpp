#pragma once

#include <string>
#include <vector>

#include "cqrl/quantile.hpp"
#include "cqrl/world.hpp"

namespace cqrl {

// The eight learnable algorithms. Baseline DQN/SAC are the N=1 degenerate
// path through the same code (single quantile = expected value).
inline const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {"dqn",     "qr-dqn", "cqr-dqn-pi", "cqr-dqn-tau",
                                                 "sac",     "qr-sac", "cqr-sac-pi", "cqr-sac-tau"};
  return names;
}

struct AgentConfig {
  std::string algorithm = "cqr-dqn-pi";
  int n_quantiles = 32;
  float gamma = 0.99f;
  float lr = 3e-4f;
  int batch_size = 64;
  int replay_capacity = 100000;
  int warmup_steps = 1000;
  float soft_target_rate = 0.005f;   // SAC
  int hard_target_interval = 1000;   // DQN family
  float eps_start = 1.0f;
  float eps_final = 0.05f;
  float eps_fraction = 0.2f;  // fraction of training over which eps decays
  float alpha = 0.2f;         // SAC temperature
  bool sac_tau_entropy = false;  // keep the entropy term in trajectory-variant targets
  int hidden = 256;
  // targets regress on reward_scale * r; keeps driving-scale returns inside
  // the quantile-Huber quadratic regime (argmax-invariant)
  float reward_scale = 1.0f;
  uint64_t seed = 0;

  void validate() const;
  bool is_sac() const;
  bool is_quantile() const { return effective_n() > 1; }
  int effective_n() const;  // 1 for the expected-value baselines
  AggregationMode mode() const;
  EvaluationVariant variant() const;

  float epsilon_at(long step, long total_steps) const;
};

// Discrete action set for the DQN family: v_f in {-2, 0, 4, 8, 14} m/s x
// l_f in {-1, 0, +1} m, index = speed_index * 3 + lateral_index.
int dqn_action_count();
TrajectoryAction dqn_action(int index);

// SAC continuous ranges: v_f in [-4, 14] m/s, l_f in [-1.5, 1.5] m.
struct ActionRange {
  double lo = 0.0, hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double half() const { return 0.5 * (hi - lo); }
};
ActionRange sac_vf_range();
ActionRange sac_lf_range();

}  // namespace cqrl
