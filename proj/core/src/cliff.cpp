#include "cqrl/cliff.hpp"

#include <algorithm>

namespace cqrl {

int CliffConfig::move(int s, CliffAction a) const {
  int col = col_of(s), row = row_of(s);
  switch (a) {
    case CliffAction::kUp: row = std::min(height - 1, row + 1); break;
    case CliffAction::kDown: row = std::max(0, row - 1); break;
    case CliffAction::kLeft: col = std::max(0, col - 1); break;
    case CliffAction::kRight: col = std::min(width - 1, col + 1); break;
  }
  return state_of(col, row);
}

CliffStepResult cliff_step(const CliffConfig& cfg, int state, CliffAction action, Rng& rng) {
  if (cfg.is_terminal_cell(cfg.col_of(state), cfg.row_of(state)))
    throw Error("cliff_step: stepping from a terminal cell");
  if (cfg.p < 0.0 || cfg.p > 1.0) throw Error("cliff_step: p outside [0,1]");
  CliffAction executed = action;
  if (rng.uniform() < cfg.p) executed = CliffAction::kDown;
  const int next = cfg.move(state, executed);
  CliffStepResult res;
  res.next_state = next;
  if (cfg.is_cliff(cfg.col_of(next), cfg.row_of(next))) {
    res.reward = cfg.cliff_reward;
    res.terminal = true;
  } else {
    res.reward = cfg.step_reward;
    res.terminal = next == cfg.goal_state();
  }
  return res;
}

MdpSpec cliff_as_mdp(const CliffConfig& cfg) {
  MdpSpec mdp;
  mdp.num_states = cfg.num_states();
  mdp.num_actions = 4;
  mdp.gamma = cfg.gamma;
  mdp.outcomes.resize(static_cast<size_t>(mdp.num_states) * 4);
  for (int s = 0; s < mdp.num_states; ++s) {
    if (cfg.is_terminal_cell(cfg.col_of(s), cfg.row_of(s))) continue;
    for (int a = 0; a < 4; ++a) {
      auto outcome_of = [&](CliffAction executed, double prob) {
        const int next = cfg.move(s, executed);
        Outcome o;
        o.next_state = next;
        o.prob = prob;
        if (cfg.is_cliff(cfg.col_of(next), cfg.row_of(next))) {
          o.reward = cfg.cliff_reward;
          o.terminal = true;
        } else {
          o.reward = cfg.step_reward;
          o.terminal = next == cfg.goal_state();
        }
        return o;
      };
      auto& outs = mdp.at(s, a);
      const Outcome intended = outcome_of(static_cast<CliffAction>(a), 1.0 - cfg.p);
      const Outcome down = outcome_of(CliffAction::kDown, cfg.p);
      if (intended.next_state == down.next_state) {
        Outcome merged = intended;
        merged.prob = 1.0;
        outs.push_back(merged);
      } else {
        if (intended.prob > 0.0) outs.push_back(intended);
        if (down.prob > 0.0) outs.push_back(down);
      }
    }
  }
  return mdp;
}

const char* cliff_path_name(CliffPath p) {
  switch (p) {
    case CliffPath::kPath1: return "path1";
    case CliffPath::kPath2: return "path2";
    case CliffPath::kOther: return "other";
  }
  return "?";
}

CliffPath classify_greedy_path(const std::vector<int>& policy, const CliffConfig& cfg) {
  int s = cfg.start_state();
  bool row1_interior = false;
  for (int step = 0; step < 100; ++step) {
    if (s == cfg.goal_state()) return row1_interior ? CliffPath::kPath1 : CliffPath::kPath2;
    if (cfg.is_cliff(cfg.col_of(s), cfg.row_of(s))) return CliffPath::kOther;
    s = cfg.move(s, static_cast<CliffAction>(policy[s]));
    const int col = cfg.col_of(s), row = cfg.row_of(s);
    if (row == 1 && col >= 1 && col <= cfg.width - 2) row1_interior = true;
  }
  return CliffPath::kOther;
}

std::string render_policy(const std::vector<int>& policy, const CliffConfig& cfg) {
  static const char kArrows[] = {'^', 'v', '<', '>'};
  std::string out;
  for (int row = cfg.height - 1; row >= 0; --row) {
    for (int col = 0; col < cfg.width; ++col) {
      const int s = cfg.state_of(col, row);
      if (cfg.is_cliff(col, row))
        out += 'X';
      else if (s == cfg.goal_state())
        out += 'G';
      else
        out += kArrows[policy[s]];
    }
    out += '\n';
  }
  return out;
}

}  // namespace cqrl
