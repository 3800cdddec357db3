#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ovml/comms/encoder.hpp"
#include "ovml/grad/checkpoint.hpp"
#include "ovml/grad/ops.hpp"

namespace ovml::mappo {

// Actor head: two stride-2 convolutions over the aggregated feature grid,
// flatten, metadata concatenated, then dense 128 -> 64 -> 5 logits.
struct ActorNet {
  grad::Tensor cw1, cb1, cw2, cb2;
  grad::Tensor fw1, fb1, fw2, fb2, fw3, fb3;
  int feat_channels = 4;
  int feat_cells = 32;
  int meta_dim = 0;

  static ActorNet init(int feat_channels, int feat_cells, int meta_dim,
                       util::Rng& rng);

  int trunk_flat_dim() const;
  grad::Tensor forward(grad::Tape* tape, const grad::Tensor& features,
                       const grad::Tensor& meta) const;  // logits [5]

  std::vector<std::pair<std::string, grad::Tensor>> named_params(
      const std::string& prefix) const;
  std::vector<grad::Tensor> params() const;
};

// Centralized critic: dense 128 -> 64 -> 1 over [state, flattened features].
// Exists only at training time; its input features are collection-time
// constants so its loss never reaches the encoder.
struct CriticNet {
  grad::Tensor w1, b1, w2, b2, w3, b3;
  int in_dim = 0;

  static CriticNet init(int in_dim, util::Rng& rng);

  grad::Tensor forward(grad::Tape* tape, const grad::Tensor& input) const;

  std::vector<std::pair<std::string, grad::Tensor>> named_params(
      const std::string& prefix) const;
  std::vector<grad::Tensor> params() const;
};

// Running first/second moments of raw returns; the critic is trained in the
// normalized space and denormalized wherever values feed the advantage
// recursion.
struct ReturnNormalizer {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void update(std::span<const double> returns);
  double std_dev() const;
  double normalize(double raw) const;
  double denormalize(double norm) const;
};

// Everything a decentralized agent runs, plus the training-only critic.
// Parameters are shared across agents (homogeneous vehicles).
struct PolicySet {
  comms::EncoderNet encoder;
  ActorNet actor;
  CriticNet critic;
  ReturnNormalizer ret_norm;

  grad::NamedTensors to_named() const;
  static PolicySet from_named(const grad::NamedTensors& named, int bev_channels,
                              int encoder_hidden, int feature_channels,
                              double occupancy_cap, int feat_cells, int meta_dim,
                              int state_dim);

  std::vector<grad::Tensor> actor_side_params() const;  // encoder + actor
  std::vector<grad::Tensor> critic_side_params() const;
};

}  // namespace ovml::mappo
