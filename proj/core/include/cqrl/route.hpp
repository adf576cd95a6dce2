#pragma once

#include <vector>

#include "cqrl/geom.hpp"

namespace cqrl {

struct Pose {
  Vec2 pos;
  double heading = 0.0;
};

struct Frenet {
  double s = 0.0;
  double l = 0.0;  // positive to the left of the direction of travel
};

// Road centerline made of straight and arc segments. Lane-following is the
// l = 0 line; l grows to the left.
class Route {
 public:
  void add_straight(double length);
  // Positive sweep turns left, negative right.
  void add_arc(double radius, double sweep);

  double length() const { return total_; }

  // Pose of the frenet point (s clamped to [0, length]).
  Pose pose_at(double s, double l) const;

  // Heading of the centerline at s.
  double heading_at(double s) const;

  // Projection of a world point onto the route.
  Frenet project(Vec2 p) const;

 private:
  struct Segment {
    bool arc = false;
    Pose start;      // pose at the segment beginning
    double length = 0.0;
    double radius = 0.0;
    double sweep = 0.0;  // signed
    Vec2 center;         // arc center
    double s0 = 0.0;     // arc-length offset of the segment start
  };
  Pose end_pose() const;

  std::vector<Segment> segs_;
  double total_ = 0.0;
};

// Route factories for the two scenarios.
Route make_straight_route(double length);
Route make_curved_route(double straight_in, double radius, double sweep, double straight_out);

}  // namespace cqrl
