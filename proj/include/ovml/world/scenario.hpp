#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ovml/util/rng.hpp"
#include "ovml/world/geometry.hpp"

namespace ovml::world {

enum class ScenarioKind { OccludedIntersection, BlindSummit };

// Sensor model parameters; rays per step derive from points_per_second / fps
// where fps = 1 / dt.
struct LidarParams {
  int channels = 32;
  double max_range = 50.0;
  double points_per_second = 1e6;
  int bev_cells = 128;
  double sensor_height = 1.7;
  double elevation_min_deg = -15.0;
  double elevation_max_deg = 5.0;
  // the feature encoder normalizes occupancy counts as min(count, cap) / cap
  double occupancy_cap = 24.0;
};

struct RangeD {
  double lo = 0.0, hi = 0.0;
  double sample(util::Rng& rng) const { return rng.uniform(lo, hi); }
};

struct SpeedProfileSeg {
  double until_progress = 1e18;  // applies while progress < until_progress
  double speed_scale = 1.0;      // multiplies the sampled base speed
};

struct SpawnSpec {
  int route = 0;
  RangeD progress;
  RangeD speed_kmh;
  RangeD length{4.4, 4.9};
  RangeD width{1.8, 2.0};
  double probability = 1.0;               // traffic only
  std::vector<SpeedProfileSeg> profile;   // traffic only; empty = constant
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::OccludedIntersection;
  double dt = 0.05;
  int max_steps = 200;
  double max_speed_kmh = 80.0;
  double accel_small_kmh = 2.0;
  double accel_large_kmh = 6.0;
  LidarParams lidar;
  std::vector<Polyline> routes;
  std::vector<int> route_lane_ids;
  std::vector<Polygon> occluders;
  std::vector<SpawnSpec> cav_spawns;
  std::vector<SpawnSpec> traffic_spawns;

  double fps() const { return 1.0 / dt; }
  int rays_per_step() const;
  int n_cavs() const { return static_cast<int>(cav_spawns.size()); }
  int max_vehicles() const {
    return n_cavs() + static_cast<int>(traffic_spawns.size());
  }

  Pose nominal_spawn_pose(const SpawnSpec& s) const;

  // Checks structural invariants, including the construction-time occlusion
  // ray test: every CAV spawn must have its sight line to at least one
  // traffic spawn blocked by an occluder. Throws ConfigError.
  void validate() const;

  static ScenarioConfig from_json(const nlohmann::json& j,
                                  const std::string& path_for_errors);
  static ScenarioConfig from_file(const std::string& path);
};

}  // namespace ovml::world
