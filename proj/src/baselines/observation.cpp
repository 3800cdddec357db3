#include "ovml/baselines/observation.hpp"

#include <cmath>

namespace ovml::baselines {

using world::VehicleState;
using world::World;

namespace {

constexpr int kEgoBlock = 6;
constexpr int kNeighborBlock = 9;
constexpr int kVehicleBlock = 9;
constexpr std::size_t kMaxMergedPoints = 200000;

void write_ego_block(std::vector<double>& out, const World& w, const VehicleState& v) {
  const auto& cfg = w.config();
  const auto& route = cfg.routes[static_cast<std::size_t>(v.route)];
  out.push_back(v.speed_kmh / cfg.max_speed_kmh);
  out.push_back(v.length / 6.0);
  out.push_back(v.width / 3.0);
  out.push_back(v.lane_id / 8.0);
  out.push_back(v.progress / route.length());
  out.push_back((route.length() - v.progress) / 100.0);
}

void write_relative_block(std::vector<double>& out, const World& w,
                          const VehicleState& ego, const VehicleState& v,
                          double range_norm) {
  const auto& cfg = w.config();
  const world::Vec2 rel = world::world_to_local(ego.pose, v.pose.position());
  out.push_back(1.0);
  out.push_back(rel.x / range_norm);
  out.push_back(rel.y / range_norm);
  out.push_back(std::cos(v.pose.heading - ego.pose.heading));
  out.push_back(std::sin(v.pose.heading - ego.pose.heading));
  out.push_back(v.speed_kmh / cfg.max_speed_kmh);
  out.push_back(v.length / 6.0);
  out.push_back(v.width / 3.0);
  out.push_back(v.lane_id / 8.0);
}

void write_empty_block(std::vector<double>& out, int n) {
  out.insert(out.end(), static_cast<std::size_t>(n), 0.0);
}

double distance(const VehicleState& a, const VehicleState& b) {
  return (a.pose.position() - b.pose.position()).norm();
}

}  // namespace

ObservationVariant variant_from_string(const std::string& s) {
  if (s == "collaborative") return ObservationVariant::Collaborative;
  if (s == "independent") return ObservationVariant::Independent;
  if (s == "ground_truth") return ObservationVariant::GroundTruth;
  if (s == "early_fusion") return ObservationVariant::EarlyFusion;
  throw ConfigError("observation_variant: unknown value '" + s + "'");
}

std::string variant_to_string(ObservationVariant v) {
  switch (v) {
    case ObservationVariant::Collaborative: return "collaborative";
    case ObservationVariant::Independent: return "independent";
    case ObservationVariant::GroundTruth: return "ground_truth";
    case ObservationVariant::EarlyFusion: return "early_fusion";
  }
  throw ContractError("bad variant");
}

ObsSchema ObsSchema::build(const world::ScenarioConfig& cfg, ObservationVariant v) {
  ObsSchema s;
  s.bev_cells = cfg.lidar.bev_cells;
  s.meta_dim = kEgoBlock + kNeighborBlock * (cfg.n_cavs() - 1);
  if (v == ObservationVariant::GroundTruth) {
    s.meta_dim += kVehicleBlock * cfg.max_vehicles();
  }
  s.state_dim = kVehicleBlock * cfg.max_vehicles() + kEgoBlock;
  return s;
}

ObsBundle build_observation(ObservationVariant v, const World& w, int ego_id,
                            const std::vector<lidar::LidarScan>& cav_scans,
                            const comms::ChannelModel& channel) {
  const auto& cfg = w.config();
  const VehicleState& ego = w.vehicle(ego_id);
  ObsBundle out;

  // actor metadata: ego block, then a slot per other CAV gated by range
  write_ego_block(out.meta, w, ego);
  for (int k = 0; k < cfg.n_cavs(); ++k) {
    if (k == ego_id) continue;
    const VehicleState& other = w.vehicle(k);
    const bool share = v != ObservationVariant::Independent && other.active &&
                       distance(ego, other) <= channel.comm_range;
    if (share) {
      write_relative_block(out.meta, w, ego, other, channel.comm_range);
    } else {
      write_empty_block(out.meta, kNeighborBlock);
    }
  }
  if (v == ObservationVariant::GroundTruth) {
    // exact pose and speed of every vehicle, occlusion bypassed
    for (const VehicleState& veh : w.vehicles()) {
      if (veh.active) {
        write_relative_block(out.meta, w, ego, veh, 100.0);
      } else {
        write_empty_block(out.meta, kVehicleBlock);
      }
    }
  }

  // centralized state: absolute kinematics of everything plus the ego block
  for (const VehicleState& veh : w.vehicles()) {
    if (veh.active) {
      out.state.push_back(1.0);
      out.state.push_back(veh.pose.x / 100.0);
      out.state.push_back(veh.pose.y / 100.0);
      out.state.push_back(std::cos(veh.pose.heading));
      out.state.push_back(std::sin(veh.pose.heading));
      out.state.push_back(veh.speed_kmh / cfg.max_speed_kmh);
      out.state.push_back(veh.length / 6.0);
      out.state.push_back(veh.width / 3.0);
      out.state.push_back(veh.lane_id / 8.0);
    } else {
      write_empty_block(out.state, kVehicleBlock);
    }
  }
  write_ego_block(out.state, w, ego);

  // raster: ego scan, or the union of in-range raw scans for early fusion
  if (v == ObservationVariant::EarlyFusion) {
    lidar::LidarScan merged = cav_scans[static_cast<std::size_t>(ego_id)];
    for (int k = 0; k < cfg.n_cavs(); ++k) {
      if (k == ego_id) continue;
      const VehicleState& other = w.vehicle(k);
      if (!other.active || distance(ego, other) > channel.comm_range) continue;
      lidar::LidarScan moved = lidar::transform_points(
          cav_scans[static_cast<std::size_t>(k)], other.pose, ego.pose);
      for (const auto& p : moved.points) {
        if (merged.points.size() >= kMaxMergedPoints) break;
        merged.points.push_back(p);
      }
    }
    out.bev = lidar::rasterize_bev(merged, cfg.lidar.bev_cells);
  } else {
    out.bev = lidar::rasterize_bev(cav_scans[static_cast<std::size_t>(ego_id)],
                                   cfg.lidar.bev_cells);
  }
  return out;
}

std::size_t early_fusion_point_count(const World& w, int ego_id,
                                     const std::vector<lidar::LidarScan>& cav_scans,
                                     const comms::ChannelModel& channel) {
  const VehicleState& ego = w.vehicle(ego_id);
  std::size_t total = 0;
  for (int k = 0; k < w.n_cavs(); ++k) {
    if (k == ego_id) continue;
    const VehicleState& other = w.vehicle(k);
    if (other.active && distance(ego, other) <= channel.comm_range) {
      total += cav_scans[static_cast<std::size_t>(k)].points.size();
    }
  }
  return total;
}

double early_fusion_bandwidth_mbps(std::size_t total_points, double fps) {
  return comms::point_cloud_mbps(total_points, fps);
}

}  // namespace ovml::baselines
