#include "cqrl/planners.hpp"

#include <algorithm>
#include <cmath>

namespace cqrl {

PlannerPerception build_perception(const WorldState& state, const Ogm& ogm,
                                   const SimParams& params) {
  PlannerPerception p;
  p.v = state.v;
  p.l = state.l;
  p.v_lim = params.v_lim;
  p.shoulder = params.lateral_bound;
  const PlannerParams pp;

  const double conflict_half_width =
      params.ego_width / 2 + params.ped_radius;  // swept corridor half width

  // visible objects on the path
  auto blocked = [&](Vec2 from, Vec2 to) {
    for (const auto& occ : state.occluders)
      if (segment_hits_rect(from, to, occ)) return true;
    return false;
  };
  const Pose ego = state.ego_pose();
  if (state.stationary_vehicle) {
    const Vec2 c = state.stationary_vehicle->center;
    const Frenet f = state.route->project(c);
    const bool on_path = std::abs(f.l) <= conflict_half_width + params.ego_width / 2;
    if (on_path && f.s > state.s && !blocked(ego.pos, c)) {
      const double gap = f.s - state.s - params.ego_length;  // bumper to bumper
      p.d_visible = std::min(p.d_visible, std::max(gap, 0.0));
    }
  }
  for (const auto& ped : state.pedestrians) {
    if (!ped.active || !ped.walking) continue;  // standing pedestrians are off-path
    const Frenet f = state.route->project(ped.pos);
    // crossing pedestrian still short of clearing the corridor
    if (f.l > conflict_half_width + 0.2) continue;
    if (ped.conflict_s <= state.s) continue;
    if (blocked(ego.pos, ped.pos)) continue;
    const double gap = ped.conflict_s - state.s - params.ego_length / 2 - params.ped_radius;
    p.d_visible = std::min(p.d_visible, std::max(gap, 0.0));
  }

  // nearest unknown cell in the conflict band ahead
  std::vector<Frenet> band;
  for (int r = 0; r < ogm.h; ++r)
    for (int c = 0; c < ogm.w; ++c) {
      if (ogm.at(r, c) != Ogm::kUnknown) continue;
      const Vec2 world = ego.pos + ogm.center_of(r, c).rotated(ego.heading);
      const Frenet f = state.route->project(world);
      if (std::abs(f.l) > pp.occ_band) continue;
      const double ahead = f.s - state.s;
      if (ahead <= params.ego_length / 2 || ahead > params.sensor_range) continue;
      p.d_occ = std::min(p.d_occ, ahead);
      band.push_back({ahead, f.l});
    }
  double side_acc = 0.0;
  int side_count = 0;
  for (const auto& f : band)
    if (f.s < p.d_occ + 15.0) {
      side_acc += f.l;
      ++side_count;
    }
  if (side_count > 0) p.occ_side = side_acc / side_count;
  return p;
}

TrajectoryAction plan_fixed(const PlannerPerception& p) { return {p.v_lim, 0.0}; }

TrajectoryAction plan_naive(const PlannerPerception& p, const PlannerParams& pp) {
  if (!std::isfinite(p.d_visible)) return {p.v_lim, 0.0};
  const double a_req = p.v * p.v / (2.0 * std::max(p.d_visible - pp.d_margin, 0.1));
  const double a = std::min(a_req, pp.a_max);
  return {std::max(-4.0, p.v - a), 0.0};
}

TrajectoryAction plan_aware(const PlannerPerception& p, const PlannerParams& pp) {
  const double d_free = std::min(p.d_occ, p.d_visible) - pp.d_margin;
  const double v_safe = std::sqrt(2.0 * pp.a_max * std::max(d_free, 0.0));

  TrajectoryAction act;
  // lateral peek away from the occluder side
  if (std::isfinite(p.d_occ) && p.d_occ < 30.0 && p.occ_side != 0.0)
    act.l_f = (p.occ_side > 0.0 ? -1.0 : 1.0) * std::min(pp.peek, p.shoulder);
  else
    act.l_f = 0.0;

  // emergency stop when a visible object demands more than the comfort decel
  if (std::isfinite(p.d_visible)) {
    const double a_req = p.v * p.v / (2.0 * std::max(p.d_visible - pp.d_margin, 0.1));
    if (a_req > pp.emergency_accel) {
      act.v_f = -4.0;
      return act;
    }
  }

  if (p.v > v_safe) {
    // lag-compensated braking toward the bound; commanded speed stays <= v_safe
    act.v_f = std::max(-4.0, std::min(v_safe, 2.0 * v_safe - p.v));
  } else {
    act.v_f = std::min(p.v_lim, v_safe);
  }
  return act;
}

PlannerKind planner_from_name(const std::string& name) {
  if (name == "fixed") return PlannerKind::kFixed;
  if (name == "naive") return PlannerKind::kNaive;
  if (name == "aware") return PlannerKind::kAware;
  throw Error("unknown planner '" + name + "'");
}

const char* planner_name(PlannerKind k) {
  switch (k) {
    case PlannerKind::kFixed: return "fixed";
    case PlannerKind::kNaive: return "naive";
    case PlannerKind::kAware: return "aware";
  }
  return "?";
}

TrajectoryAction run_planner(PlannerKind kind, const PlannerPerception& p,
                             const PlannerParams& pp) {
  switch (kind) {
    case PlannerKind::kFixed: return plan_fixed(p);
    case PlannerKind::kNaive: return plan_naive(p, pp);
    case PlannerKind::kAware: return plan_aware(p, pp);
  }
  throw Error("run_planner: bad kind");
}

}  // namespace cqrl
