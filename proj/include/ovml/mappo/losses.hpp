#pragma once

#include "ovml/grad/ops.hpp"

namespace ovml::mappo {

// probability ratio against the stored behavior log-prob, evaluated in log
// space so tiny probabilities divide without underflow
double ratio_from_log_probs(double log_prob_new, double log_prob_old);

// per-sample pieces of the clipped objectives; plain doubles for fixtures
double clipped_surrogate(double ratio, double advantage, double eps);
double clipped_value_loss(double value, double value_old, double ret, double eps);

// tape-recorded versions used by the update loop
// min(r*A, clip(r, 1-eps, 1+eps)*A) with r = exp(lp_new - lp_old)
grad::Tensor surrogate_term(grad::Tape* tape, const grad::Tensor& log_prob_new,
                            double log_prob_old, double advantage, double eps);

// max((V - R)^2, (clip(V, V_old-eps, V_old+eps) - R)^2)
grad::Tensor value_loss_term(grad::Tape* tape, const grad::Tensor& value,
                             double value_old, double ret, double eps);

}  // namespace ovml::mappo
