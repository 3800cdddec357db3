#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ovml/comms/codec.hpp"
#include "ovml/grad/ops.hpp"
#include "ovml/lidar/types.hpp"

namespace ovml::comms {

// Feature encoder shared by all connected vehicles: two 3x3 convolutions
// with relu, stride 1, padding 1, so a HxW raster yields [out_channels,H,W]
// features. Occupancy counts are normalized to min(count, cap)/cap before
// the first layer; intensity is already in [0,1].
struct EncoderNet {
  grad::Tensor w1, b1, w2, b2;
  int hidden = 8;
  int out_channels = 4;
  double occupancy_cap = 24.0;

  static EncoderNet init(int in_channels, int hidden, int out_channels,
                         double occupancy_cap, util::Rng& rng);

  grad::Tensor forward(grad::Tape* tape, const lidar::BevGrid& grid) const;

  std::vector<std::pair<std::string, grad::Tensor>> named_params(
      const std::string& prefix) const;
  std::vector<grad::Tensor> params() const;
};

enum class Aggregation { Max, Mean, Sum };

Aggregation aggregation_from_string(const std::string& s);

struct AggregatedFeatures {
  grad::Tensor tensor;
  std::vector<int> senders;  // always includes ego
};

// Fuse ego features with receiver-aligned neighbor features. Max keeps any
// sender's occupancy evidence alive; gradients flow through the ego path
// only (neighbor tensors are decoded constants).
AggregatedFeatures aggregate(grad::Tape* tape, const grad::Tensor& ego_features,
                             int ego_id,
                             std::span<const std::pair<int, grad::Tensor>> aligned,
                             Aggregation kind);

// Decode a message and resample its feature grid into the receiver's frame
// with nearest-cell sampling; cells that fall outside the sender grid are 0.
// max_range fixes the metric footprint of the feature grid.
grad::Tensor align_to_receiver(const FeatureMessage& msg,
                               const world::Pose& receiver_pose, double max_range);

FeatureMessage make_message(int sender_id, int step, const world::Pose& pose,
                            const grad::Tensor& features);

}  // namespace ovml::comms
