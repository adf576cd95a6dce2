#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace cqrl {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
};

// Rectangle with center, half extents along its local axes, and heading of
// the local x axis in world frame.
struct OrientedRect {
  Vec2 center;
  double half_len = 0.0;  // along heading
  double half_wid = 0.0;
  double heading = 0.0;

  std::array<Vec2, 4> corners() const {
    const Vec2 ax = Vec2{1, 0}.rotated(heading);
    const Vec2 ay = Vec2{0, 1}.rotated(heading);
    return {center + ax * half_len + ay * half_wid, center + ax * half_len - ay * half_wid,
            center - ax * half_len - ay * half_wid, center - ax * half_len + ay * half_wid};
  }

  // Point expressed in the rect's local frame.
  Vec2 to_local(Vec2 p) const { return (p - center).rotated(-heading); }
  bool contains(Vec2 p) const {
    const Vec2 q = to_local(p);
    return std::abs(q.x) <= half_len && std::abs(q.y) <= half_wid;
  }
};

// Separating-axis test; touching boundaries count as overlap (closed sets).
bool rects_overlap(const OrientedRect& a, const OrientedRect& b);

// Closest point on the rect vs disc center; tangency counts as overlap.
bool rect_disc_overlap(const OrientedRect& r, Vec2 center, double radius);

constexpr double kNoHit = std::numeric_limits<double>::infinity();

// Distance along the ray (origin, unit dir) to the rectangle boundary, kNoHit
// if missed. A ray starting inside returns 0.
double ray_rect(Vec2 origin, Vec2 dir, const OrientedRect& rect);

// Distance along the ray to a disc.
double ray_disc(Vec2 origin, Vec2 dir, Vec2 center, double radius);

// True if the open segment a-b intersects the rectangle (visibility test).
bool segment_hits_rect(Vec2 a, Vec2 b, const OrientedRect& rect);

}  // namespace cqrl
