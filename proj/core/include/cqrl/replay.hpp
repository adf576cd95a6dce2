#pragma once

#include <vector>

#include "cqrl/agent_config.hpp"

namespace cqrl {

struct Transition {
  std::vector<float> obs;
  int action_index = -1;      // DQN family
  float action_vf = 0.0f;     // SAC family (raw action values)
  float action_lf = 0.0f;
  float reward = 0.0f;
  std::vector<float> next_obs;
  TerminalKind terminal = TerminalKind::kNone;
};

// Ring buffer; uniform sampling with replacement from the run's generator.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw Error("replay: capacity must be positive");
  }

  void push(Transition t);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  const Transition& at(int i) const { return items_[i]; }

  std::vector<int> sample_indices(int k, Rng& rng) const;

 private:
  int capacity_;
  int cursor_ = 0;
  std::vector<Transition> items_;
};

}  // namespace cqrl
