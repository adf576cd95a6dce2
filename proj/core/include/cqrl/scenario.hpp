#pragma once

#include "cqrl/world.hpp"

namespace cqrl {

struct ScenarioConfig {
  // pedestrian crossing
  double ped_route_length = 150.0;
  double crosswalk_s = 100.0;
  double ped_occluder_length = 8.0;   // along the road
  double ped_occluder_depth = 2.5;    // away from the road
  double ped_spawn_prob = 0.5;
  double ped_speed_min = 1.0;
  double ped_speed_max = 1.6;
  double ped_trigger_min = 10.0;
  double ped_trigger_max = 60.0;
  // curved road
  double curve_straight_in = 50.0;
  double curve_radius = 30.0;
  double curve_sweep_deg = 90.0;
  double curve_straight_out = 50.0;
  double vehicle_spawn_prob = 0.5;
  int wall_pieces = 14;
  // curriculum
  int max_level = 5;
  double clearance_base = 7.0;  // clearance = base - level
};

struct CurriculumPoint {
  int level = 1;
  double clearance = 6.0;
};

// level = min(max, 1 + floor(step / steps_per_level)); occluder lateral
// clearance from the road edge shrinks one meter per level.
CurriculumPoint curriculum_level(long global_step, long steps_per_level,
                                 const ScenarioConfig& cfg = {});

WorldState spawn_scenario(ScenarioKind kind, int level, Rng& rng, const SimParams& params,
                          const ScenarioConfig& cfg = {});

}  // namespace cqrl
