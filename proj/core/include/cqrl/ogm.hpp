#pragma once

#include <vector>

#include "cqrl/world.hpp"

namespace cqrl {

// Ego-frame occupancy grid: x forward in [x_min, x_max], y left in
// [-y_half, y_half], row-major with row = y index from -y_half, col = x index
// from x_min. Cell values: 0 free, 0.5 unknown, 1 occupied.
struct Ogm {
  int h = 0, w = 0;
  double cell = 0.5;
  double x_min = -5.0, y_min = -20.0;
  std::vector<float> cells;

  static constexpr float kFree = 0.0f;
  static constexpr float kUnknown = 0.5f;
  static constexpr float kOccupied = 1.0f;

  float at(int row, int col) const { return cells[static_cast<size_t>(row) * w + col]; }
  float& at(int row, int col) { return cells[static_cast<size_t>(row) * w + col]; }
  Vec2 center_of(int row, int col) const {
    return {x_min + (col + 0.5) * cell, y_min + (row + 0.5) * cell};
  }
  bool cell_of(Vec2 ego_frame, int* row, int* col) const {
    const int c = static_cast<int>(std::floor((ego_frame.x - x_min) / cell));
    const int r = static_cast<int>(std::floor((ego_frame.y - y_min) / cell));
    if (r < 0 || r >= h || c < 0 || c >= w) return false;
    *row = r;
    *col = c;
    return true;
  }
};

// Casts `sensor_rays` rays from the ego center. A cell is free when its
// center lies closer than the nearest hit along its bearing, occupied when a
// hit surface falls in it, unknown when shadowed or beyond sensor range. The
// ego footprint is forced free.
Ogm raycast_ogm(const WorldState& state, const SimParams& params);

}  // namespace cqrl
