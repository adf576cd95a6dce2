#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cqrl/route.hpp"
#include "cqrl/targets.hpp"

namespace cqrl {

// Final speed / final lateral offset commanded to the trajectory executor.
struct TrajectoryAction {
  double v_f = 0.0;
  double l_f = 0.0;
};

struct SimParams {
  double decision_period = 1.0;
  double micro_dt = 0.1;
  double tau_c = 0.4;  // executor time constant
  double v_lim = 14.0;
  double lane_half_width = 2.0;
  double lateral_bound = 1.5;  // lane half-width margin + shoulder for |l|
  double ego_length = 4.5;
  double ego_width = 1.8;
  double ped_radius = 0.3;
  int episode_cap = 60;  // decision steps
  double sensor_range = 40.0;
  int sensor_rays = 360;
  double ogm_cell = 0.5;
  // ego-frame window [x_min, x_max] x [-y_half, y_half]
  double ogm_x_min = -5.0;
  double ogm_x_max = 35.0;
  double ogm_y_half = 20.0;
};

struct Pedestrian {
  Vec2 pos;             // world
  double speed = 1.3;   // crossing speed, m/s
  Vec2 walk_dir;        // unit, set at spawn
  double trigger_distance = 20.0;  // ego distance-to-conflict that starts the walk
  double conflict_s = 0.0;         // route position of the crossing
  double target_travel = 7.0;      // distance walked before despawn
  double walked = 0.0;
  bool walking = false;
  bool active = true;
};

enum class ScenarioKind { kPedestrianCrossing, kCurvedRoad };
const char* scenario_name(ScenarioKind k);
ScenarioKind scenario_from_name(const std::string& name);

struct WorldState {
  std::shared_ptr<const Route> route;
  ScenarioKind kind = ScenarioKind::kPedestrianCrossing;
  double s = 0.0;
  double l = 0.0;
  double v = 0.0;
  std::vector<OrientedRect> occluders;  // static occluders and barrier wall pieces
  std::vector<Pedestrian> pedestrians;
  std::optional<OrientedRect> stationary_vehicle;
  double time = 0.0;
  int step = 0;
  int difficulty = 1;
  double occluder_clearance = 6.0;
  bool done = false;

  Pose ego_pose() const { return route->pose_at(s, l); }
  OrientedRect ego_rect(const SimParams& p) const {
    const Pose pose = ego_pose();
    return OrientedRect{pose.pos, p.ego_length / 2, p.ego_width / 2, pose.heading};
  }
};

// v(t) = max(0, v_f + (v0 - v_f) e^(-t/tau)); l approaches l_f the same way
// but each micro-step's lateral change is clamped to dt * min(1, 0.25 v).
struct TrajectoryPoint {
  double t = 0.0, v = 0.0, l = 0.0;
};
std::vector<TrajectoryPoint> generate_trajectory(double v0, double l0, TrajectoryAction action,
                                                 double horizon, double dt, double tau_c = 0.4);

// Eq.-style rewards.
double reward_mobility(double v, double v_lim);
double reward_comfort(double a, double l);
double reward_step(bool collision, double r_m, double r_c);

bool detect_collision(const OrientedRect& ego, const std::vector<OrientedRect>& rects,
                      const std::vector<Pedestrian>& peds, double ped_radius);

struct StepResult {
  double reward = 0.0;
  TerminalKind terminal = TerminalKind::kNone;
  double accel = 0.0;    // over the decision period
  double v_end = 0.0;
  bool collision = false;
};

// Executes the first decision period of the trajectory at micro_dt substeps,
// advancing pedestrians and checking collisions each substep.
StepResult step_world(WorldState& state, TrajectoryAction action, const SimParams& params);

}  // namespace cqrl
