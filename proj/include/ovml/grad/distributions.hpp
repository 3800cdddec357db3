#pragma once

#include <span>

#include "ovml/util/rng.hpp"

namespace ovml::grad {

struct CategoricalSample {
  int index;
  double log_prob;
};

// draw ~ softmax(logits); log_prob is log softmax(logits)[index]
CategoricalSample sample_categorical(std::span<const double> logits,
                                     util::Rng& rng);

int argmax(std::span<const double> values);

double log_sum_exp(std::span<const double> values);

// log softmax(logits)[index]
double log_softmax_at(std::span<const double> logits, int index);

// Shannon entropy of softmax(logits), nats; always in [0, ln K]
double entropy_nats(std::span<const double> logits);

}  // namespace ovml::grad
