#include "ovml/comms/encoder.hpp"

#include <cmath>

namespace ovml::comms {

using grad::Tape;
using grad::Tensor;

EncoderNet EncoderNet::init(int in_channels, int hidden, int out_channels,
                            double occupancy_cap, util::Rng& rng) {
  EncoderNet e;
  e.hidden = hidden;
  e.out_channels = out_channels;
  e.occupancy_cap = occupancy_cap;
  const int k = 3;
  e.w1 = Tensor::glorot({hidden, in_channels, k, k}, in_channels * k * k,
                        hidden * k * k, rng);
  e.b1 = Tensor::zeros({hidden}, true);
  e.w2 = Tensor::glorot({out_channels, hidden, k, k}, hidden * k * k,
                        out_channels * k * k, rng);
  e.b2 = Tensor::zeros({out_channels}, true);
  return e;
}

Tensor EncoderNet::forward(Tape* tape, const lidar::BevGrid& grid) const {
  const Tensor& cells = grid.cells;
  Tensor input = Tensor::zeros(cells.shape());
  auto in = input.value();
  auto raw = cells.value();
  const std::size_t plane =
      static_cast<std::size_t>(cells.extent(1)) * cells.extent(2);
  for (std::size_t i = 0; i < plane; ++i) {
    in[i] = std::min(raw[i], occupancy_cap) / occupancy_cap;
  }
  for (std::size_t i = plane; i < raw.size(); ++i) in[i] = raw[i];
  Tensor h = grad::relu(tape, grad::conv2d(tape, input, w1, b1, 1, 1));
  return grad::relu(tape, grad::conv2d(tape, h, w2, b2, 1, 1));
}

std::vector<std::pair<std::string, Tensor>> EncoderNet::named_params(
    const std::string& prefix) const {
  return {{prefix + "/w1", w1}, {prefix + "/b1", b1},
          {prefix + "/w2", w2}, {prefix + "/b2", b2}};
}

std::vector<Tensor> EncoderNet::params() const { return {w1, b1, w2, b2}; }

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "max") return Aggregation::Max;
  if (s == "mean") return Aggregation::Mean;
  if (s == "sum") return Aggregation::Sum;
  throw ConfigError("comms.aggregation: unknown value '" + s + "'");
}

AggregatedFeatures aggregate(Tape* tape, const Tensor& ego_features, int ego_id,
                             std::span<const std::pair<int, Tensor>> aligned,
                             Aggregation kind) {
  AggregatedFeatures out;
  out.senders.push_back(ego_id);
  Tensor acc = ego_features;
  for (const auto& [sender, feats] : aligned) {
    if (feats.shape() != ego_features.shape()) {
      throw ShapeError("aggregate: neighbor features " + grad::shape_str(feats.shape()) +
                       " vs ego " + grad::shape_str(ego_features.shape()));
    }
    out.senders.push_back(sender);
    switch (kind) {
      case Aggregation::Max: acc = grad::max_elem(tape, acc, feats); break;
      case Aggregation::Mean:
      case Aggregation::Sum: acc = grad::add(tape, acc, feats); break;
    }
  }
  if (kind == Aggregation::Mean && !aligned.empty()) {
    acc = grad::scale(tape, acc, 1.0 / (1.0 + static_cast<double>(aligned.size())));
  }
  out.tensor = acc;
  return out;
}

Tensor align_to_receiver(const FeatureMessage& msg, const world::Pose& receiver_pose,
                         double max_range) {
  const Tensor decoded = decompress(msg.payload);
  const int c = decoded.extent(0);
  const int h = decoded.extent(1);
  const int w = decoded.extent(2);
  const world::Pose sender_pose{msg.pose_x, msg.pose_y, msg.pose_heading};
  const double res = 2.0 * max_range / h;

  Tensor out = Tensor::zeros(decoded.shape());
  auto ov = out.value();
  auto dv = decoded.value();
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      // receiver cell center -> world -> sender frame -> sender cell
      const world::Vec2 local{(ix + 0.5) * res - max_range,
                              (iy + 0.5) * res - max_range};
      const world::Vec2 world_pt = world::local_to_world(receiver_pose, local);
      const world::Vec2 sender_local = world::world_to_local(sender_pose, world_pt);
      const int sx = static_cast<int>(
          std::floor((sender_local.x + max_range) / res));
      const int sy = static_cast<int>(
          std::floor((sender_local.y + max_range) / res));
      if (sx < 0 || sx >= w || sy < 0 || sy >= h) continue;
      const std::size_t dst = static_cast<std::size_t>(iy) * w + ix;
      const std::size_t src = static_cast<std::size_t>(sy) * w + sx;
      for (int ch = 0; ch < c; ++ch) {
        ov[ch * plane + dst] = dv[ch * plane + src];
      }
    }
  }
  return out;
}

FeatureMessage make_message(int sender_id, int step, const world::Pose& pose,
                            const Tensor& features) {
  FeatureMessage m;
  m.sender_id = static_cast<std::uint32_t>(sender_id);
  m.step = static_cast<std::uint32_t>(step);
  m.pose_x = static_cast<float>(pose.x);
  m.pose_y = static_cast<float>(pose.y);
  m.pose_heading = static_cast<float>(pose.heading);
  m.payload = compress(features);
  return m;
}

}  // namespace ovml::comms
