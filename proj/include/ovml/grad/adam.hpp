#pragma once

#include <cstdint>
#include <vector>

#include "ovml/grad/tensor.hpp"

namespace ovml::grad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected adaptive updates. Moment accumulators mirror parameter
// shapes; the step counter advances by exactly one per step().
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig cfg);

  void step();
  void zero_grad();

  // global L2 clip over the concatenation of all parameter gradients;
  // no-op when max_norm <= 0. Returns the pre-clip norm.
  double clip_grad_norm(double max_norm);

  std::int64_t step_count() const { return t_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  std::vector<Tensor> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t t_ = 0;
};

}  // namespace ovml::grad
