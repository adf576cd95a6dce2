#pragma once

#include "cqrl/mdp.hpp"

namespace cqrl {

enum class CliffAction { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

// 4x12 cliff walk. Row 0 is the bottom row: start at (col 0, row 0), goal at
// (col 11, row 0), cliff cells cols 1..10 of row 0. Reward -1 per step,
// entering a cliff cell gives -20 and terminates, the goal terminates. With
// probability p any action is replaced by a down movement.
struct CliffConfig {
  int width = 12;
  int height = 4;
  double p = 0.1;
  double step_reward = -1.0;
  double cliff_reward = -20.0;
  double gamma = 1.0;  // episodic

  int num_states() const { return width * height; }
  int state_of(int col, int row) const { return row * width + col; }
  int col_of(int s) const { return s % width; }
  int row_of(int s) const { return s / width; }
  int start_state() const { return state_of(0, 0); }
  int goal_state() const { return state_of(width - 1, 0); }
  bool is_cliff(int col, int row) const {
    return row == 0 && col >= 1 && col <= width - 2;
  }
  bool is_terminal_cell(int col, int row) const {
    return is_cliff(col, row) || state_of(col, row) == goal_state();
  }
  // Movement clamped at walls.
  int move(int s, CliffAction a) const;
};

struct CliffStepResult {
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
};

// One environment step; the action is replaced by down with probability p.
// Stepping from a terminal cell is an error.
CliffStepResult cliff_step(const CliffConfig& cfg, int state, CliffAction action, Rng& rng);

// Exact transition law as an MdpSpec (outcomes merged when identical).
MdpSpec cliff_as_mdp(const CliffConfig& cfg);

enum class CliffPath { kPath1, kPath2, kOther };
const char* cliff_path_name(CliffPath p);

// Rolls the deterministic policy out with p forced to 0. path1 if the rollout
// occupies row 1 at any interior column, path2 if it reaches the goal staying
// in rows >= 2 at interior columns, other if the goal is not reached within
// 100 steps.
CliffPath classify_greedy_path(const std::vector<int>& policy, const CliffConfig& cfg);

// Ascii rendering of a greedy policy over the grid (tests and the oracle CLI).
std::string render_policy(const std::vector<int>& policy, const CliffConfig& cfg);

}  // namespace cqrl
