#include "cqrl/world.hpp"

#include <algorithm>
#include <cmath>

namespace cqrl {

const char* scenario_name(ScenarioKind k) {
  return k == ScenarioKind::kPedestrianCrossing ? "pedestrian-crossing" : "curved-road";
}

ScenarioKind scenario_from_name(const std::string& name) {
  if (name == "pedestrian-crossing") return ScenarioKind::kPedestrianCrossing;
  if (name == "curved-road") return ScenarioKind::kCurvedRoad;
  throw Error("unknown scenario '" + name + "'");
}

std::vector<TrajectoryPoint> generate_trajectory(double v0, double l0, TrajectoryAction action,
                                                 double horizon, double dt, double tau_c) {
  if (horizon <= 0.0 || dt <= 0.0) throw Error("generate_trajectory: horizon and dt must be > 0");
  std::vector<TrajectoryPoint> out;
  out.reserve(static_cast<size_t>(horizon / dt) + 1);
  double l = l0;
  double v_prev = std::max(0.0, v0);
  for (double t = dt; t <= horizon + 1e-9; t += dt) {
    const double decay = std::exp(-t / tau_c);
    const double v = std::max(0.0, action.v_f + (v0 - action.v_f) * decay);
    const double l_exp = action.l_f + (l0 - action.l_f) * decay;
    const double max_dl = dt * std::min(1.0, 0.25 * v_prev);
    l += std::clamp(l_exp - l, -max_dl, max_dl);
    out.push_back({t, v, l});
    v_prev = v;
  }
  return out;
}

double reward_mobility(double v, double v_lim) {
  if (v < 0.0) throw Error("reward_mobility: negative speed");
  if (v <= v_lim) return v;
  const double over = v - v_lim;
  return std::max(0.0, v - over * over);
}

double reward_comfort(double a, double l) { return -a * a - std::abs(l); }

double reward_step(bool collision, double r_m, double r_c) {
  return collision ? 0.0 : 1.0 + r_m + r_c;
}

bool detect_collision(const OrientedRect& ego, const std::vector<OrientedRect>& rects,
                      const std::vector<Pedestrian>& peds, double ped_radius) {
  for (const auto& r : rects)
    if (rects_overlap(ego, r)) return true;
  for (const auto& p : peds)
    if (p.active && rect_disc_overlap(ego, p.pos, ped_radius)) return true;
  return false;
}

StepResult step_world(WorldState& state, TrajectoryAction action, const SimParams& params) {
  if (state.done) throw Error("step_world: stepping a finished episode");
  StepResult res;
  const double v_start = state.v;
  action.v_f = std::clamp(action.v_f, -params.v_lim, params.v_lim);
  action.l_f = std::clamp(action.l_f, -params.lateral_bound, params.lateral_bound);

  const auto traj =
      generate_trajectory(state.v, state.l, action, params.decision_period, params.micro_dt,
                          params.tau_c);

  std::vector<OrientedRect> solid;
  if (state.stationary_vehicle) solid.push_back(*state.stationary_vehicle);

  double elapsed = 0.0;
  bool reached_goal = false;
  for (const auto& pt : traj) {
    state.s += pt.v * params.micro_dt;
    state.l = pt.l;
    state.v = pt.v;
    elapsed = pt.t;

    // pedestrians: trigger on ego distance to their conflict point, then walk
    for (auto& ped : state.pedestrians) {
      if (!ped.active) continue;
      if (!ped.walking && ped.conflict_s - state.s <= ped.trigger_distance) ped.walking = true;
      if (ped.walking) {
        ped.pos = ped.pos + ped.walk_dir * (ped.speed * params.micro_dt);
        ped.walked += ped.speed * params.micro_dt;
        if (ped.walked >= ped.target_travel) ped.active = false;
      }
    }

    const OrientedRect ego = state.ego_rect(params);
    if (detect_collision(ego, solid, state.pedestrians, params.ped_radius) ||
        detect_collision(ego, state.occluders, {}, params.ped_radius)) {
      res.collision = true;
      break;
    }
    if (state.s >= state.route->length()) {
      reached_goal = true;
      break;
    }
  }

  state.time += elapsed;
  state.step += 1;
  res.v_end = state.v;
  res.accel = (state.v - v_start) / std::max(elapsed, params.micro_dt);

  if (res.collision) {
    res.terminal = TerminalKind::kCollision;
    res.reward = reward_step(true, 0.0, 0.0);
  } else {
    const double r_m = reward_mobility(state.v, params.v_lim);
    const double r_c = reward_comfort(res.accel, state.l);
    res.reward = reward_step(false, r_m, r_c);
    if (reached_goal)
      res.terminal = TerminalKind::kGoal;
    else if (state.step >= params.episode_cap)
      res.terminal = TerminalKind::kTimeout;
  }
  state.done = res.terminal != TerminalKind::kNone;
  return res;
}

}  // namespace cqrl
