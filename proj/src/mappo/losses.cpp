#include "ovml/mappo/losses.hpp"

#include <algorithm>
#include <cmath>

namespace ovml::mappo {

using grad::Tape;
using grad::Tensor;

double ratio_from_log_probs(double log_prob_new, double log_prob_old) {
  return std::exp(log_prob_new - log_prob_old);
}

double clipped_surrogate(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double clipped_value_loss(double value, double value_old, double ret, double eps) {
  const double unclipped = (value - ret) * (value - ret);
  const double vc = std::clamp(value, value_old - eps, value_old + eps);
  const double clipped = (vc - ret) * (vc - ret);
  return std::max(unclipped, clipped);
}

Tensor surrogate_term(Tape* tape, const Tensor& log_prob_new, double log_prob_old,
                      double advantage, double eps) {
  Tensor ratio = grad::exp_elem(tape, grad::add_const(tape, log_prob_new, -log_prob_old));
  if (!std::isfinite(ratio.value()[0])) {
    throw NumericError("surrogate: non-finite probability ratio");
  }
  Tensor s1 = grad::scale(tape, ratio, advantage);
  Tensor s2 = grad::scale(tape, grad::clamp_const(tape, ratio, 1.0 - eps, 1.0 + eps),
                          advantage);
  return grad::min_elem(tape, s1, s2);
}

Tensor value_loss_term(Tape* tape, const Tensor& value, double value_old, double ret,
                       double eps) {
  Tensor unclipped = grad::square(tape, grad::add_const(tape, value, -ret));
  Tensor clipped = grad::square(
      tape, grad::add_const(tape, grad::clamp_const(tape, value, value_old - eps,
                                                    value_old + eps),
                            -ret));
  return grad::max_elem(tape, unclipped, clipped);
}

}  // namespace ovml::mappo
