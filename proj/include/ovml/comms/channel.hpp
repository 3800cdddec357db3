#pragma once

#include <vector>

#include "ovml/comms/codec.hpp"
#include "ovml/world/world.hpp"

namespace ovml::comms {

struct ProtocolBudgets {
  double dsrc_mbps = 2.0;
  double cv2x_mbps = 7.2;
};

struct ChannelModel {
  double comm_range = 70.0;
  double fps = 20.0;
  ProtocolBudgets budgets;
};

// Range-gated delivery: keeps messages whose sender is a connected vehicle
// within comm_range of the receiver. Traffic vehicles never send. Pure
// order-preserving filter; the caller excludes the receiver's own message.
std::vector<FeatureMessage> deliver(const std::vector<FeatureMessage>& messages,
                                    int receiver_id, const world::World& w,
                                    const ChannelModel& channel);

double bandwidth_mbps(std::size_t payload_bytes, double fps);
bool budget_check(double mbps, double budget_mbps);

// accounting helpers for the ledgers and the bandwidth CLI
double raw_f32_mbps(int c, int h, int w, double fps);
// raw f32 bit-rate divided by an overall compression ratio
double ratio_reported_mbps(int c, int h, int w, double fps, double ratio);
// raw point cloud: 4 dims x 32 bits per point
double point_cloud_mbps(std::size_t point_count, double fps);

}  // namespace ovml::comms
