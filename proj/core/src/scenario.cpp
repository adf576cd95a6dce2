#include "cqrl/scenario.hpp"

#include <cmath>

namespace cqrl {

CurriculumPoint curriculum_level(long global_step, long steps_per_level,
                                 const ScenarioConfig& cfg) {
  if (steps_per_level <= 0) throw Error("curriculum_level: steps_per_level must be positive");
  CurriculumPoint pt;
  pt.level = static_cast<int>(std::min<long>(cfg.max_level, 1 + global_step / steps_per_level));
  pt.clearance = cfg.clearance_base - pt.level;
  return pt;
}

namespace {

WorldState spawn_pedestrian_crossing(int level, Rng& rng, const SimParams& params,
                                     const ScenarioConfig& cfg) {
  WorldState w;
  w.kind = ScenarioKind::kPedestrianCrossing;
  w.route = std::make_shared<Route>(make_straight_route(cfg.ped_route_length));
  w.difficulty = level;
  w.occluder_clearance = cfg.clearance_base - level;
  w.v = params.v_lim;

  // occluder on the right side, ending just before the crosswalk
  const double near_edge = -(params.lane_half_width + w.occluder_clearance);
  OrientedRect occ;
  occ.center = {cfg.crosswalk_s - 2.0 - cfg.ped_occluder_length / 2,
                near_edge - cfg.ped_occluder_depth / 2};
  occ.half_len = cfg.ped_occluder_length / 2;
  occ.half_wid = cfg.ped_occluder_depth / 2;
  occ.heading = 0.0;
  w.occluders.push_back(occ);

  if (rng.uniform() < cfg.ped_spawn_prob) {
    Pedestrian ped;
    const double lateral = near_edge - 0.8;  // inside the shadow, behind the occluder line
    ped.pos = {cfg.crosswalk_s, lateral};
    ped.speed = rng.uniform(cfg.ped_speed_min, cfg.ped_speed_max);
    ped.walk_dir = {0.0, 1.0};  // crossing left across the road
    ped.trigger_distance = rng.uniform(cfg.ped_trigger_min, cfg.ped_trigger_max);
    ped.conflict_s = cfg.crosswalk_s;
    ped.target_travel = std::abs(lateral) + params.lane_half_width + 1.5;
    w.pedestrians.push_back(ped);
  }
  return w;
}

WorldState spawn_curved_road(int level, Rng& rng, const SimParams& params,
                             const ScenarioConfig& cfg) {
  WorldState w;
  w.kind = ScenarioKind::kCurvedRoad;
  const double sweep = cfg.curve_sweep_deg * 3.141592653589793 / 180.0;
  auto route = std::make_shared<Route>(make_curved_route(cfg.curve_straight_in, cfg.curve_radius,
                                                         sweep, cfg.curve_straight_out));
  w.route = route;
  w.difficulty = level;
  w.occluder_clearance = cfg.clearance_base - level;
  w.v = params.v_lim;

  // inner barrier wall along the arc at the curriculum clearance, approximated
  // by chord rectangles at lateral offset lane_half_width + clearance
  const double wall_l = params.lane_half_width + w.occluder_clearance;
  const double s0 = cfg.curve_straight_in;
  const double s1 = cfg.curve_straight_in + cfg.curve_radius * sweep;
  const int pieces = cfg.wall_pieces;
  for (int i = 0; i < pieces; ++i) {
    const double sa = s0 + (s1 - s0) * i / pieces;
    const double sb = s0 + (s1 - s0) * (i + 1) / pieces;
    const Pose pa = route->pose_at(sa, wall_l);
    const Pose pb = route->pose_at(sb, wall_l);
    OrientedRect piece;
    piece.center = (pa.pos + pb.pos) * 0.5;
    const Vec2 d = pb.pos - pa.pos;
    piece.half_len = d.norm() / 2 + 0.1;
    piece.half_wid = 0.25;
    piece.heading = std::atan2(d.y, d.x);
    w.occluders.push_back(piece);
  }

  if (rng.uniform() < cfg.vehicle_spawn_prob) {
    // uniformly on the hidden part of the arc: rejection-sample positions not
    // visible from the spawn pose
    const Pose start = route->pose_at(0.0, 0.0);
    double veh_s = s1 - 2.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double cand = rng.uniform(s0 + 2.0, s1 - 2.0);
      const Pose vp = route->pose_at(cand, 0.0);
      bool hidden = false;
      for (const auto& piece : w.occluders)
        if (segment_hits_rect(start.pos, vp.pos, piece)) {
          hidden = true;
          break;
        }
      if (hidden) {
        veh_s = cand;
        break;
      }
    }
    const Pose vp = route->pose_at(veh_s, 0.0);
    w.stationary_vehicle =
        OrientedRect{vp.pos, params.ego_length / 2, params.ego_width / 2, vp.heading};
  }
  return w;
}

}  // namespace

WorldState spawn_scenario(ScenarioKind kind, int level, Rng& rng, const SimParams& params,
                          const ScenarioConfig& cfg) {
  if (level < 1 || level > cfg.max_level) throw Error("spawn_scenario: level out of range");
  return kind == ScenarioKind::kPedestrianCrossing
             ? spawn_pedestrian_crossing(level, rng, params, cfg)
             : spawn_curved_road(level, rng, params, cfg);
}

}  // namespace cqrl
