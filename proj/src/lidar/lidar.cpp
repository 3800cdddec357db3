#include "ovml/lidar/lidar.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "ovml/world/world.hpp"

namespace ovml::lidar {

using world::Pose;
using world::Segment;
using world::Vec2;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::vector<Segment> collect_surfaces(const world::World& w, int ego_id) {
  std::vector<Segment> segs;
  for (const world::VehicleState& v : w.vehicles()) {
    if (v.id == ego_id || !v.active) continue;
    const auto corners = world::rect_corners(v.pose, v.length, v.width);
    for (int i = 0; i < 4; ++i) segs.push_back({corners[i], corners[(i + 1) % 4]});
  }
  for (const world::Polygon& occ : w.config().occluders) {
    for (const Segment& e : occ.edges()) segs.push_back(e);
  }
  return segs;
}

struct AzimuthHit {
  bool hit = false;
  double range = 0.0;
};

AzimuthHit nearest_hit(Vec2 origin, Vec2 dir, const std::vector<Segment>& segs,
                       double max_range) {
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : segs) {
    const auto t = world::ray_segment_param(origin, dir, s);
    if (t && *t < best) best = *t;
  }
  if (best <= max_range) return {true, best};
  return {};
}

template <bool Parallel>
LidarScan raycast_impl(const world::World& w, int ego_id,
                       const world::LidarParams& params, double fps) {
  const world::VehicleState& ego = w.vehicle(ego_id);
  LidarScan scan;
  scan.sensor_pose = ego.pose;
  scan.channels = params.channels;
  scan.max_range = params.max_range;

  const int total_rays = static_cast<int>(params.points_per_second / fps);
  const int n_az = total_rays / params.channels;
  if (n_az <= 0) return scan;

  const auto segs = collect_surfaces(w, ego_id);
  std::vector<AzimuthHit> hits(static_cast<std::size_t>(n_az));
  const Vec2 origin = ego.pose.position();

  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n_az; ++j) {
      const double az = ego.pose.heading + kTau * j / n_az;
      hits[static_cast<std::size_t>(j)] =
          nearest_hit(origin, {std::cos(az), std::sin(az)}, segs, params.max_range);
    }
  } else {
    for (int j = 0; j < n_az; ++j) {
      const double az = ego.pose.heading + kTau * j / n_az;
      hits[static_cast<std::size_t>(j)] =
          nearest_hit(origin, {std::cos(az), std::sin(az)}, segs, params.max_range);
    }
  }

  const double deg = 0.017453292519943295;
  const double elev_lo = params.elevation_min_deg * deg;
  const double elev_hi = params.elevation_max_deg * deg;
  scan.points.reserve(static_cast<std::size_t>(n_az) * params.channels / 4);
  for (int j = 0; j < n_az; ++j) {
    const AzimuthHit& h = hits[static_cast<std::size_t>(j)];
    if (!h.hit) continue;
    const double az_local = kTau * j / n_az;  // sensor frame
    const double px = h.range * std::cos(az_local);
    const double py = h.range * std::sin(az_local);
    const double intensity = 1.0 - h.range / params.max_range;
    for (int c = 0; c < params.channels; ++c) {
      const double frac = (c + 0.5) / params.channels;
      const double elev = elev_lo + (elev_hi - elev_lo) * frac;
      LidarPoint p;
      p.x = px;
      p.y = py;
      p.z = params.sensor_height + h.range * std::tan(elev);
      p.intensity = intensity;
      scan.points.push_back(p);
    }
  }
  return scan;
}

}  // namespace

LidarScan raycast_scan(const world::World& w, int ego_id,
                       const world::LidarParams& params, double fps) {
  return raycast_impl<true>(w, ego_id, params, fps);
}

LidarScan raycast_scan_serial(const world::World& w, int ego_id,
                              const world::LidarParams& params, double fps) {
  return raycast_impl<false>(w, ego_id, params, fps);
}

LidarScan apply_dropout(const LidarScan& scan, double rate, util::Rng& rng) {
  if (rate < 0.0 || rate > 1.0) {
    throw ContractError("dropout rate must be in [0,1]");
  }
  LidarScan out;
  out.sensor_pose = scan.sensor_pose;
  out.channels = scan.channels;
  out.max_range = scan.max_range;
  if (rate == 0.0) {
    out.points = scan.points;
    return out;
  }
  out.points.reserve(scan.points.size());
  for (const LidarPoint& p : scan.points) {
    if (rng.uniform() >= rate) out.points.push_back(p);
  }
  return out;
}

LidarScan transform_points(const LidarScan& scan, const Pose& from, const Pose& to) {
  LidarScan out;
  out.sensor_pose = to;
  out.channels = scan.channels;
  out.max_range = scan.max_range;
  out.points.reserve(scan.points.size());
  for (const LidarPoint& p : scan.points) {
    const Vec2 world_pt = world::local_to_world(from, {p.x, p.y});
    const Vec2 local = world::world_to_local(to, world_pt);
    LidarPoint q = p;
    q.x = local.x;
    q.y = local.y;
    out.points.push_back(q);
  }
  return out;
}

BevGrid rasterize_bev(const LidarScan& scan, int cells) {
  if (cells <= 0) throw ContractError("rasterize_bev: cells must be positive");
  BevGrid grid;
  grid.max_range = scan.max_range;
  grid.resolution = 2.0 * scan.max_range / cells;
  grid.cells = grad::Tensor::zeros({2, cells, cells});
  auto data = grid.cells.value();
  const std::size_t plane = static_cast<std::size_t>(cells) * cells;
  for (const LidarPoint& p : scan.points) {
    const double gx = (p.x + scan.max_range) / grid.resolution;
    const double gy = (p.y + scan.max_range) / grid.resolution;
    if (gx < 0.0 || gy < 0.0) continue;
    const int ix = static_cast<int>(gx);
    const int iy = static_cast<int>(gy);
    if (ix >= cells || iy >= cells) continue;
    const std::size_t at = static_cast<std::size_t>(iy) * cells + ix;
    data[at] += 1.0;
    data[plane + at] = std::max(data[plane + at], p.intensity);
  }
  return grid;
}

std::string dump_scan(const LidarScan& scan) {
  std::string out;
  char line[128];
  for (const LidarPoint& p : scan.points) {
    std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %.9g\n", p.x, p.y, p.z,
                  p.intensity);
    out += line;
  }
  return out;
}

}  // namespace ovml::lidar
