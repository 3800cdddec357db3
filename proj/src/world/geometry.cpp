#include "ovml/world/geometry.hpp"

#include <cmath>
#include <limits>

#include "ovml/util/errors.hpp"

namespace ovml::world {

double Vec2::norm() const { return std::sqrt(x * x + y * y); }

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 world_to_local(const Pose& pose, Vec2 p) {
  return rotate(p - pose.position(), -pose.heading);
}

Vec2 local_to_world(const Pose& pose, Vec2 p) {
  return rotate(p, pose.heading) + pose.position();
}

std::vector<Segment> Polygon::edges() const {
  std::vector<Segment> out;
  const std::size_t n = pts.size();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({pts[i], pts[(i + 1) % n]});
  return out;
}

bool segments_intersect(Vec2 p, Vec2 p2, Vec2 q, Vec2 q2) {
  const Vec2 r = p2 - p;
  const Vec2 s = q2 - q;
  const double denom = r.cross(s);
  const Vec2 pq = q - p;
  if (std::abs(denom) < 1e-15) {
    // parallel: overlap only if collinear and ranges touch
    if (std::abs(pq.cross(r)) > 1e-12) return false;
    const double rr = r.dot(r);
    if (rr < 1e-18) return false;
    double t0 = pq.dot(r) / rr;
    double t1 = (q2 - p).dot(r) / rr;
    if (t0 > t1) std::swap(t0, t1);
    return t1 >= 0.0 && t0 <= 1.0;
  }
  const double t = pq.cross(s) / denom;
  const double u = pq.cross(r) / denom;
  return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

bool segment_hits_polygon(Vec2 a, Vec2 b, const Polygon& poly) {
  for (const Segment& e : poly.edges())
    if (segments_intersect(a, b, e.a, e.b)) return true;
  return false;
}

std::optional<double> ray_segment_param(Vec2 origin, Vec2 dir, const Segment& seg) {
  const Vec2 s = seg.b - seg.a;
  const double denom = dir.cross(s);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const Vec2 d = seg.a - origin;
  const double t = d.cross(s) / denom;
  const double u = d.cross(dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

std::array<Vec2, 4> rect_corners(const Pose& center, double length, double width) {
  const double hl = 0.5 * length, hw = 0.5 * width;
  std::array<Vec2, 4> out;
  const Vec2 corners[4] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
  for (int i = 0; i < 4; ++i) out[i] = local_to_world(center, corners[i]);
  return out;
}

namespace {

// interval of projections of corners onto axis
void project(const std::array<Vec2, 4>& r, Vec2 axis, double& lo, double& hi) {
  lo = hi = r[0].dot(axis);
  for (int i = 1; i < 4; ++i) {
    const double v = r[i].dot(axis);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

}  // namespace

bool rects_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  // separating axis over both rectangles' edge normals; strict overlap only
  const std::array<Vec2, 4>* rects[2] = {&a, &b};
  for (const auto* rect : rects) {
    for (int i = 0; i < 2; ++i) {
      const Vec2 edge = (*rect)[(i + 1) % 4] - (*rect)[i];
      const Vec2 axis{-edge.y, edge.x};
      double alo, ahi, blo, bhi;
      project(a, axis, alo, ahi);
      project(b, axis, blo, bhi);
      if (ahi <= blo || bhi <= alo) return false;
    }
  }
  return true;
}

Polyline::Polyline(std::vector<Vec2> pts) : pts_(std::move(pts)) {
  if (pts_.size() < 2) throw ContractError("polyline needs at least 2 points");
  cum_.resize(pts_.size());
  cum_[0] = 0.0;
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    cum_[i] = cum_[i - 1] + (pts_[i] - pts_[i - 1]).norm();
  }
  length_ = cum_.back();
  if (length_ <= 0.0) throw ContractError("polyline has zero length");
}

Pose Polyline::pose_at(double s) const {
  if (s <= 0.0) s = 0.0;
  if (s >= length_) s = length_;
  std::size_t i = 1;
  while (i + 1 < pts_.size() && cum_[i] < s) ++i;
  const Vec2 a = pts_[i - 1], b = pts_[i];
  const double seg_len = cum_[i] - cum_[i - 1];
  const double t = seg_len > 0.0 ? (s - cum_[i - 1]) / seg_len : 0.0;
  const Vec2 p = a + (b - a) * t;
  const double heading = std::atan2(b.y - a.y, b.x - a.x);
  return {p.x, p.y, heading};
}

std::vector<std::pair<double, double>> polyline_crossings(const Polyline& a,
                                                          const Polyline& b) {
  std::vector<std::pair<double, double>> out;
  const auto& pa = a.points();
  const auto& pb = b.points();
  double sa = 0.0;
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
    const Vec2 dira = pa[i + 1] - pa[i];
    const double la = dira.norm();
    double sb = 0.0;
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      const Vec2 dirb = pb[j + 1] - pb[j];
      const double lb = dirb.norm();
      const double denom = dira.cross(dirb);
      if (std::abs(denom) > 1e-15) {
        const Vec2 d = pb[j] - pa[i];
        const double t = d.cross(dirb) / denom;
        const double u = d.cross(dira) / denom;
        if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) {
          out.emplace_back(sa + t * la, sb + u * lb);
        }
      }
      sb += lb;
    }
    sa += la;
  }
  return out;
}

}  // namespace ovml::world
