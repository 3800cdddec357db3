#pragma once

#include <string>
#include <vector>

#include "ovml/comms/channel.hpp"
#include "ovml/lidar/lidar.hpp"
#include "ovml/world/world.hpp"

namespace ovml::baselines {

// The four experiment conditions. Collaborative is the feature-sharing
// pipeline; GroundTruth appends exact poses of every vehicle (occluded
// included) on top of it; EarlyFusion merges raw in-range point clouds
// before rasterization; Independent uses the ego scan alone.
enum class ObservationVariant { Collaborative, Independent, GroundTruth, EarlyFusion };

ObservationVariant variant_from_string(const std::string& s);
std::string variant_to_string(ObservationVariant v);

// Fixed vector layouts so network shapes are static per scenario + variant.
struct ObsSchema {
  int meta_dim = 0;   // actor metadata
  int state_dim = 0;  // centralized critic state
  int bev_channels = 2;
  int bev_cells = 0;

  static ObsSchema build(const world::ScenarioConfig& cfg, ObservationVariant v);
};

struct ObsBundle {
  std::vector<double> meta;
  std::vector<double> state;
  lidar::BevGrid bev;  // ego raster, or the fused raster for EarlyFusion
};

// cav_scans are indexed by CAV id and already carry any dropout. Metadata
// neighbor slots are gated by the communication range; messages are handled
// by the caller (they need the encoder).
ObsBundle build_observation(ObservationVariant v, const world::World& w, int ego_id,
                            const std::vector<lidar::LidarScan>& cav_scans,
                            const comms::ChannelModel& channel);

// merged in-range raw point count for the early fusion bandwidth ledger
std::size_t early_fusion_point_count(const world::World& w, int ego_id,
                                     const std::vector<lidar::LidarScan>& cav_scans,
                                     const comms::ChannelModel& channel);

// points x 4 dims x 32 bits x fps
double early_fusion_bandwidth_mbps(std::size_t total_points, double fps);

}  // namespace ovml::baselines
