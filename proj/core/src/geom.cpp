#include "cqrl/geom.hpp"

#include <algorithm>
#include <array>

namespace cqrl {

bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {Vec2{1, 0}.rotated(a.heading), Vec2{0, 1}.rotated(a.heading),
                                    Vec2{1, 0}.rotated(b.heading), Vec2{0, 1}.rotated(b.heading)};
  for (const Vec2& axis : axes) {
    double amin = kNoHit, amax = -kNoHit, bmin = kNoHit, bmax = -kNoHit;
    for (const Vec2& p : ca) {
      const double d = p.dot(axis);
      amin = std::min(amin, d);
      amax = std::max(amax, d);
    }
    for (const Vec2& p : cb) {
      const double d = p.dot(axis);
      bmin = std::min(bmin, d);
      bmax = std::max(bmax, d);
    }
    if (amax < bmin || bmax < amin) return false;
  }
  return true;
}

bool rect_disc_overlap(const OrientedRect& r, Vec2 center, double radius) {
  const Vec2 q = r.to_local(center);
  const double dx = std::max(std::abs(q.x) - r.half_len, 0.0);
  const double dy = std::max(std::abs(q.y) - r.half_wid, 0.0);
  return dx * dx + dy * dy <= radius * radius;
}

double ray_rect(Vec2 origin, Vec2 dir, const OrientedRect& rect) {
  // slab test in the rect's local frame
  const Vec2 o = rect.to_local(origin);
  const Vec2 d = dir.rotated(-rect.heading);
  double tmin = 0.0, tmax = kNoHit;
  const double lo[2] = {-rect.half_len, -rect.half_wid};
  const double hi[2] = {rect.half_len, rect.half_wid};
  const double ov[2] = {o.x, o.y};
  const double dv[2] = {d.x, d.y};
  for (int i = 0; i < 2; ++i) {
    if (std::abs(dv[i]) < 1e-12) {
      if (ov[i] < lo[i] || ov[i] > hi[i]) return kNoHit;
      continue;
    }
    double t1 = (lo[i] - ov[i]) / dv[i];
    double t2 = (hi[i] - ov[i]) / dv[i];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return kNoHit;
  }
  return tmin;
}

double ray_disc(Vec2 origin, Vec2 dir, Vec2 center, double radius) {
  const Vec2 f = origin - center;
  const double b = f.dot(dir);
  const double c = f.dot(f) - radius * radius;
  if (c <= 0.0) return 0.0;  // inside
  const double disc = b * b - c;
  if (disc < 0.0) return kNoHit;
  const double t = -b - std::sqrt(disc);
  return t >= 0.0 ? t : kNoHit;
}

bool segment_hits_rect(Vec2 a, Vec2 b, const OrientedRect& rect) {
  const Vec2 d = b - a;
  const double len = d.norm();
  if (len < 1e-12) return rect.contains(a);
  const Vec2 dir = d * (1.0 / len);
  const double t = ray_rect(a, dir, rect);
  return t < len;
}

}  // namespace cqrl
