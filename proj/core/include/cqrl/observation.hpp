#pragma once

#include "cqrl/ogm.hpp"

namespace cqrl {

// 4 channels at pooled resolution (OGM_t, OGM_{t-1}, road mask, speed plane),
// flattened channel-major; raw speed retained for planners.
struct Observation {
  int channels = 4;
  int h = 0, w = 0;
  std::vector<float> data;  // channels * h * w
  float raw_v = 0.0f;

  long size() const { return static_cast<long>(data.size()); }
};

// Road-surface mask at OGM resolution: 1 where the cell center lies on the
// drivable surface (|l| <= lane half-width, 0 <= s <= route length).
std::vector<float> road_mask(const WorldState& state, const SimParams& params, const Ogm& like);

// 4x-average-pools each full-resolution channel, fills the speed plane with
// v / v_lim. The first step of an episode passes ogm_t twice.
Observation build_observation(const Ogm& ogm_t, const Ogm& ogm_prev,
                              const std::vector<float>& road, double v, double v_lim,
                              int pool = 4);

}  // namespace cqrl
