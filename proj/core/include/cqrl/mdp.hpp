#pragma once

#include <vector>

#include "cqrl/common.hpp"

namespace cqrl {

struct Outcome {
  int next_state = 0;
  double prob = 0.0;
  double reward = 0.0;
  bool terminal = false;
};

// Finite MDP with explicit transition law. A state with no outcomes for any
// action is terminal (its Q row is identically zero and never queried).
struct MdpSpec {
  int num_states = 0;
  int num_actions = 0;
  // outcomes[s * num_actions + a]
  std::vector<std::vector<Outcome>> outcomes;
  double gamma = 1.0;

  const std::vector<Outcome>& at(int s, int a) const { return outcomes[s * num_actions + a]; }
  std::vector<Outcome>& at(int s, int a) { return outcomes[s * num_actions + a]; }

  bool state_terminal(int s) const {
    for (int a = 0; a < num_actions; ++a)
      if (!at(s, a).empty()) return false;
    return true;
  }

  // Probabilities per non-terminal (s,a) must sum to 1 within 1e-9; rewards
  // finite; gamma in [0,1].
  void validate() const;
};

}  // namespace cqrl
