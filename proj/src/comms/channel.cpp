#include "ovml/comms/channel.hpp"

#include <cmath>

namespace ovml::comms {

std::vector<FeatureMessage> deliver(const std::vector<FeatureMessage>& messages,
                                    int receiver_id, const world::World& w,
                                    const ChannelModel& channel) {
  const world::VehicleState& rx = w.vehicle(receiver_id);
  std::vector<FeatureMessage> out;
  for (const FeatureMessage& m : messages) {
    const world::VehicleState& tx = w.vehicle(static_cast<int>(m.sender_id));
    if (!tx.is_cav) continue;
    const double dx = tx.pose.x - rx.pose.x;
    const double dy = tx.pose.y - rx.pose.y;
    if (std::sqrt(dx * dx + dy * dy) <= channel.comm_range) out.push_back(m);
  }
  return out;
}

double bandwidth_mbps(std::size_t payload_bytes, double fps) {
  return static_cast<double>(payload_bytes) * 8.0 * fps / 1e6;
}

bool budget_check(double mbps, double budget_mbps) { return mbps <= budget_mbps; }

double raw_f32_mbps(int c, int h, int w, double fps) {
  return static_cast<double>(c) * h * w * 4.0 * 8.0 * fps / 1e6;
}

double ratio_reported_mbps(int c, int h, int w, double fps, double ratio) {
  return static_cast<double>(c) * h * w * 32.0 * fps / (ratio * 1e6);
}

double point_cloud_mbps(std::size_t point_count, double fps) {
  return static_cast<double>(point_count) * 4.0 * 32.0 * fps / 1e6;
}

}  // namespace ovml::comms
