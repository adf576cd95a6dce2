#include "cqrl/ogm.hpp"

#include <cmath>

namespace cqrl {

Ogm raycast_ogm(const WorldState& state, const SimParams& params) {
  Ogm g;
  g.cell = params.ogm_cell;
  g.x_min = params.ogm_x_min;
  g.y_min = -params.ogm_y_half;
  g.w = static_cast<int>(std::round((params.ogm_x_max - params.ogm_x_min) / g.cell));
  g.h = static_cast<int>(std::round(2.0 * params.ogm_y_half / g.cell));
  g.cells.assign(static_cast<size_t>(g.h) * g.w, Ogm::kUnknown);

  const Pose ego = state.ego_pose();
  const int rays = params.sensor_rays;
  const double dtheta = 2.0 * 3.141592653589793 / rays;

  // nearest hit distance per ray (ego-frame bearing k * dtheta)
  std::vector<double> hit(rays, kNoHit);
  for (int k = 0; k < rays; ++k) {
    const double bearing = k * dtheta;
    const Vec2 dir = Vec2{std::cos(bearing), std::sin(bearing)}.rotated(ego.heading);
    double best = kNoHit;
    for (const auto& rect : state.occluders) best = std::min(best, ray_rect(ego.pos, dir, rect));
    if (state.stationary_vehicle)
      best = std::min(best, ray_rect(ego.pos, dir, *state.stationary_vehicle));
    for (const auto& ped : state.pedestrians)
      if (ped.active) best = std::min(best, ray_disc(ego.pos, dir, ped.pos, params.ped_radius));
    hit[k] = best;
  }

  // classify each cell by the ray covering its bearing
  const double surface_band = g.cell * 0.75;
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c) {
      const Vec2 p = g.center_of(r, c);
      const double dist = p.norm();
      if (dist > params.sensor_range) continue;  // unknown
      int k = static_cast<int>(std::lround(std::atan2(p.y, p.x) / dtheta));
      k = ((k % rays) + rays) % rays;
      if (dist < hit[k] - surface_band)
        g.at(r, c) = Ogm::kFree;
      else if (dist <= hit[k] + surface_band)
        g.at(r, c) = Ogm::kOccupied;
      // else shadowed: unknown
    }

  // mark exact hit points (thin surfaces between angular bins)
  for (int k = 0; k < rays; ++k) {
    if (hit[k] > params.sensor_range) continue;
    const double bearing = k * dtheta;
    const Vec2 p_ego = Vec2{std::cos(bearing), std::sin(bearing)} * hit[k];
    int r, c;
    if (g.cell_of(p_ego, &r, &c)) g.at(r, c) = Ogm::kOccupied;
  }

  // ego footprint free
  const double hl = params.ego_length / 2, hw = params.ego_width / 2;
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c) {
      const Vec2 p = g.center_of(r, c);
      if (std::abs(p.x) <= hl && std::abs(p.y) <= hw) g.at(r, c) = Ogm::kFree;
    }
  return g;
}

}  // namespace cqrl
