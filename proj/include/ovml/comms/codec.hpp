#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ovml/grad/tensor.hpp"

namespace ovml::comms {

// 8-bit affine quantization of a [C,H,W] feature block. scale == 0 is the
// sentinel for a constant block (max == min); every byte decodes to
// zero_point. Round-trip error is bounded by scale/2 per value.
struct QuantizedBlock {
  float scale = 0.0f;
  float zero_point = 0.0f;
  std::array<std::uint16_t, 3> extents{};  // C, H, W
  std::vector<std::uint8_t> bytes;
};

QuantizedBlock compress(const grad::Tensor& features);
grad::Tensor decompress(const QuantizedBlock& block);

// Pose-stamped feature payload as shared over the V2V channel. Pose fields
// are f32 because that is their wire width.
struct FeatureMessage {
  std::uint32_t sender_id = 0;
  std::uint32_t step = 0;
  float pose_x = 0.0f;
  float pose_y = 0.0f;
  float pose_heading = 0.0f;
  QuantizedBlock payload;

  std::size_t wire_size() const;
};

// Wire layout, little-endian:
//   sender_id u32 | step u32 | pose 3xf32 | scale f32 | zero_point f32 |
//   extents 3xu16 | payload bytes (C*H*W)
inline constexpr std::size_t kWireHeaderBytes = 4 + 4 + 12 + 4 + 4 + 6;

std::vector<std::uint8_t> serialize(const FeatureMessage& msg);
FeatureMessage deserialize(std::span<const std::uint8_t> bytes);

}  // namespace ovml::comms
