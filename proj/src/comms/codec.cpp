#include "ovml/comms/codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace ovml::comms {

static_assert(std::endian::native == std::endian::little,
              "wire codec assumes a little-endian host");

QuantizedBlock compress(const grad::Tensor& features) {
  if (features.rank() != 3) {
    throw ShapeError("compress: expected [C,H,W], got " + grad::shape_str(features.shape()));
  }
  QuantizedBlock b;
  b.extents = {static_cast<std::uint16_t>(features.extent(0)),
               static_cast<std::uint16_t>(features.extent(1)),
               static_cast<std::uint16_t>(features.extent(2))};
  auto vals = features.value();
  double lo = vals[0], hi = vals[0];
  for (double v : vals) {
    if (!std::isfinite(v)) throw NumericError("compress: non-finite feature value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  b.zero_point = static_cast<float>(lo);
  b.bytes.resize(vals.size(), 0);
  if (hi == lo) {
    b.scale = 0.0f;  // constant block sentinel
    return b;
  }
  b.scale = static_cast<float>((hi - lo) / 255.0);
  const double s = b.scale;
  const double zp = b.zero_point;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double q = std::nearbyint((vals[i] - zp) / s);
    b.bytes[i] = static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
  }
  return b;
}

grad::Tensor decompress(const QuantizedBlock& block) {
  const std::vector<int> shape{block.extents[0], block.extents[1], block.extents[2]};
  const std::size_t n = static_cast<std::size_t>(grad::shape_numel(shape));
  if (block.bytes.size() != n) {
    throw FormatError("decompress: payload has " + std::to_string(block.bytes.size()) +
                      " bytes for extents " + grad::shape_str(shape));
  }
  std::vector<double> out(n);
  const double s = block.scale;
  const double zp = block.zero_point;
  for (std::size_t i = 0; i < n; ++i) out[i] = zp + s * block.bytes[i];
  return grad::Tensor::from_data(std::move(out), shape);
}

std::size_t FeatureMessage::wire_size() const {
  return kWireHeaderBytes + payload.bytes.size();
}

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T take(std::span<const std::uint8_t>& in, const char* what) {
  if (in.size() < sizeof(T)) {
    throw FormatError(std::string("message truncated at ") + what);
  }
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in = in.subspan(sizeof(T));
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize(const FeatureMessage& msg) {
  std::vector<std::uint8_t> out;
  out.reserve(msg.wire_size());
  put(out, msg.sender_id);
  put(out, msg.step);
  put(out, msg.pose_x);
  put(out, msg.pose_y);
  put(out, msg.pose_heading);
  put(out, msg.payload.scale);
  put(out, msg.payload.zero_point);
  for (std::uint16_t e : msg.payload.extents) put(out, e);
  out.insert(out.end(), msg.payload.bytes.begin(), msg.payload.bytes.end());
  return out;
}

FeatureMessage deserialize(std::span<const std::uint8_t> bytes) {
  FeatureMessage m;
  m.sender_id = take<std::uint32_t>(bytes, "sender_id");
  m.step = take<std::uint32_t>(bytes, "step");
  m.pose_x = take<float>(bytes, "pose_x");
  m.pose_y = take<float>(bytes, "pose_y");
  m.pose_heading = take<float>(bytes, "pose_heading");
  m.payload.scale = take<float>(bytes, "scale");
  m.payload.zero_point = take<float>(bytes, "zero_point");
  for (auto& e : m.payload.extents) e = take<std::uint16_t>(bytes, "extents");
  const std::size_t n = static_cast<std::size_t>(m.payload.extents[0]) *
                        m.payload.extents[1] * m.payload.extents[2];
  if (bytes.size() != n) {
    throw FormatError("message payload size " + std::to_string(bytes.size()) +
                      " != extents product " + std::to_string(n));
  }
  m.payload.bytes.assign(bytes.begin(), bytes.end());
  return m;
}

}  // namespace ovml::comms
