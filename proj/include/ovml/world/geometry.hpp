#pragma once

#include <array>
#include <optional>
#include <vector>

namespace ovml::world {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, CCW from +x
  Vec2 position() const { return {x, y}; }
};

Vec2 rotate(Vec2 v, double angle);
// p expressed in the frame of `pose`
Vec2 world_to_local(const Pose& pose, Vec2 p);
Vec2 local_to_world(const Pose& pose, Vec2 p);

struct Segment {
  Vec2 a, b;
};

// simple polygon, CCW or CW both fine; edges close back to pts.front()
struct Polygon {
  std::vector<Vec2> pts;
  std::vector<Segment> edges() const;
};

// proper or touching intersection of segments [p,p2] and [q,q2]
bool segments_intersect(Vec2 p, Vec2 p2, Vec2 q, Vec2 q2);

bool segment_hits_polygon(Vec2 a, Vec2 b, const Polygon& poly);

// smallest t >= 0 with origin + t*dir on seg, or nullopt; dir need not be unit
std::optional<double> ray_segment_param(Vec2 origin, Vec2 dir, const Segment& seg);

// footprint rectangle of a vehicle: center pose, length along heading
std::array<Vec2, 4> rect_corners(const Pose& center, double length, double width);

// strict interior overlap (shared corner or edge contact is not a collision)
bool rects_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b);

// Arc-length parametrized path. Headings come from segment tangents; pose_at
// clamps into [0, length].
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> pts);

  double length() const { return length_; }
  Pose pose_at(double s) const;
  const std::vector<Vec2>& points() const { return pts_; }

 private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
  double length_ = 0.0;
};

// arc-length pairs (s_a, s_b) where the two paths cross
std::vector<std::pair<double, double>> polyline_crossings(const Polyline& a,
                                                          const Polyline& b);

}  // namespace ovml::world
