#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ovml/grad/tensor.hpp"

namespace ovml::grad {

// Versioned binary tensor container, all little-endian:
//   magic "OVML" | version u32 | tensor count u32
//   per tensor: name length u32, UTF-8 name, rank u32, extents u64 each,
//               row-major f32 payload
// Values are narrowed to f32 on save and widened back on load.

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

void save_checkpoint(const std::string& path, const NamedTensors& tensors);

// throws FormatError on bad magic/version/truncation
NamedTensors load_checkpoint(const std::string& path);

// lookup helper; throws FormatError when the name or shape does not match
Tensor expect_tensor(const NamedTensors& tensors, const std::string& name,
                     const std::vector<int>& shape);

}  // namespace ovml::grad
