#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ovml::mappo {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantage + value, before any normalization
};

// delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
// A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// V(s_{T}) for the post-terminal state is bootstrap_value (0 when terminal).
// Normalization happens at buffer finalize, not here.
GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values,
                      std::span<const std::uint8_t> dones,
                      double bootstrap_value, double gamma, double lambda);

// batch-wide standardization applied at buffer finalize: mean 0, std 1
void normalize_advantages(std::span<double> advantages);

}  // namespace ovml::mappo
