#pragma once

#include "cqrl/ogm.hpp"

namespace cqrl {

// What a rule-based planner sees: nearest visible object on the ego path and
// nearest occluded cell that could conceal a crossing agent, both as
// distances ahead along the route.
struct PlannerPerception {
  double d_visible = std::numeric_limits<double>::infinity();
  double d_occ = std::numeric_limits<double>::infinity();
  double occ_side = 0.0;  // mean lateral offset of near occluded cells (sign = side)
  double v = 0.0;
  double l = 0.0;
  double v_lim = 14.0;
  double shoulder = 1.5;
};

// Derived deterministically from the world and the current OGM. Visibility of
// objects uses line-of-sight against the occluders; d_occ scans unknown OGM
// cells within a lateral conflict band of the path.
PlannerPerception build_perception(const WorldState& state, const Ogm& ogm,
                                   const SimParams& params);

struct PlannerParams {
  double d_margin = 2.0;       // standoff to conflicts
  double a_max = 4.0;          // assumed braking authority, m/s^2
  double emergency_accel = 2.0;  // required decel that triggers a full brake
  double occ_band = 5.0;       // lateral band in which unknown cells matter
  double peek = 1.0;           // lateral peek magnitude
};

// Drives at the speed limit, ignores everything.
TrajectoryAction plan_fixed(const PlannerPerception& p);

// Ignores occlusion; brakes with constant deceleration (capped at a_max)
// toward a stop just before the nearest visible object.
TrajectoryAction plan_naive(const PlannerPerception& p, const PlannerParams& pp = {});

// Bounds speed so a full stop before the occlusion horizon stays possible
// (v_safe = sqrt(2 a_max d)), tracks that bound with lag compensation, brakes
// hard when a visible object demands it, and peeks away from the occluder.
TrajectoryAction plan_aware(const PlannerPerception& p, const PlannerParams& pp = {});

enum class PlannerKind { kFixed, kNaive, kAware };
PlannerKind planner_from_name(const std::string& name);
const char* planner_name(PlannerKind k);

TrajectoryAction run_planner(PlannerKind kind, const PlannerPerception& p,
                             const PlannerParams& pp = {});

}  // namespace cqrl
