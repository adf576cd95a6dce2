#include "cqrl/route.hpp"

#include <algorithm>

#include "cqrl/common.hpp"

namespace cqrl {

Pose Route::end_pose() const {
  if (segs_.empty()) return Pose{{0, 0}, 0.0};
  const Segment& s = segs_.back();
  if (!s.arc) {
    return Pose{s.start.pos + Vec2{1, 0}.rotated(s.start.heading) * s.length, s.start.heading};
  }
  const double dir = s.sweep >= 0 ? 1.0 : -1.0;
  const double a0 = s.start.heading - dir * 1.5707963267948966;
  const double a1 = a0 + s.sweep;
  return Pose{s.center + Vec2{std::cos(a1), std::sin(a1)} * s.radius, s.start.heading + s.sweep};
}

void Route::add_straight(double length) {
  if (length <= 0.0) throw Error("route: non-positive segment length");
  Segment seg;
  seg.start = end_pose();
  seg.length = length;
  seg.s0 = total_;
  segs_.push_back(seg);
  total_ += length;
}

void Route::add_arc(double radius, double sweep) {
  if (radius <= 0.0 || sweep == 0.0) throw Error("route: bad arc");
  Segment seg;
  seg.arc = true;
  seg.start = end_pose();
  seg.radius = radius;
  seg.sweep = sweep;
  seg.length = radius * std::abs(sweep);
  seg.s0 = total_;
  const double dir = sweep >= 0 ? 1.0 : -1.0;
  // center is radius to the left (right for negative sweep) of the start pose
  seg.center = seg.start.pos + Vec2{0, dir}.rotated(seg.start.heading) * radius;
  segs_.push_back(seg);
  total_ += seg.length;
}

Pose Route::pose_at(double s, double l) const {
  if (segs_.empty()) throw Error("route: empty");
  s = std::clamp(s, 0.0, total_);
  const Segment* seg = &segs_.back();
  for (const auto& cand : segs_)
    if (s <= cand.s0 + cand.length + 1e-12) {
      seg = &cand;
      break;
    }
  const double u = s - seg->s0;
  if (!seg->arc) {
    const Vec2 fwd = Vec2{1, 0}.rotated(seg->start.heading);
    const Vec2 left = Vec2{0, 1}.rotated(seg->start.heading);
    return Pose{seg->start.pos + fwd * u + left * l, seg->start.heading};
  }
  const double dir = seg->sweep >= 0 ? 1.0 : -1.0;
  const double a0 = seg->start.heading - dir * 1.5707963267948966;
  const double ang = a0 + dir * (u / seg->radius);
  const double heading = seg->start.heading + dir * (u / seg->radius);
  // positive l moves toward the center on a left turn
  const double rr = seg->radius - dir * l;
  return Pose{seg->center + Vec2{std::cos(ang), std::sin(ang)} * rr, heading};
}

double Route::heading_at(double s) const { return pose_at(s, 0.0).heading; }

Frenet Route::project(Vec2 p) const {
  Frenet best;
  double best_cost = kNoHit;
  for (const auto& seg : segs_) {
    Frenet cand;
    if (!seg.arc) {
      const Vec2 fwd = Vec2{1, 0}.rotated(seg.start.heading);
      const Vec2 left = Vec2{0, 1}.rotated(seg.start.heading);
      const Vec2 rel = p - seg.start.pos;
      const double u = std::clamp(rel.dot(fwd), 0.0, seg.length);
      cand.s = seg.s0 + u;
      const Vec2 on = seg.start.pos + fwd * u;
      cand.l = (p - on).dot(left);
    } else {
      const double dir = seg.sweep >= 0 ? 1.0 : -1.0;
      const double a0 = seg.start.heading - dir * 1.5707963267948966;
      const Vec2 rel = p - seg.center;
      double ang = std::atan2(rel.y, rel.x);
      // unwrap relative to the arc start angle in sweep direction
      double da = dir * (ang - a0);
      while (da < 0) da += 2 * 3.141592653589793;
      while (da > 2 * 3.141592653589793) da -= 2 * 3.141592653589793;
      const double u = std::clamp(da * seg.radius, 0.0, seg.length);
      cand.s = seg.s0 + u;
      const double ang_c = a0 + dir * (u / seg.radius);
      const Vec2 on = seg.center + Vec2{std::cos(ang_c), std::sin(ang_c)} * seg.radius;
      const Vec2 left = Vec2{0, 1}.rotated(seg.start.heading + dir * (u / seg.radius));
      cand.l = (p - on).dot(left);
    }
    const Pose cp = pose_at(cand.s, 0.0);
    const double cost = (p - cp.pos).norm();
    if (cost < best_cost) {
      best_cost = cost;
      best = cand;
    }
  }
  return best;
}

Route make_straight_route(double length) {
  Route r;
  r.add_straight(length);
  return r;
}

Route make_curved_route(double straight_in, double radius, double sweep, double straight_out) {
  Route r;
  r.add_straight(straight_in);
  r.add_arc(radius, sweep);
  r.add_straight(straight_out);
  return r;
}

}  // namespace cqrl
