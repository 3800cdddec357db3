#include "ovml/grad/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ovml/util/errors.hpp"

namespace ovml::grad {

namespace {

void check_finite(std::span<const double> logits) {
  for (double v : logits) {
    if (!std::isfinite(v)) throw NumericError("categorical: non-finite logit");
  }
  if (logits.empty()) throw ContractError("categorical: empty logits");
}

}  // namespace

double log_sum_exp(std::span<const double> values) {
  double mx = values[0];
  for (double v : values) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : values) z += std::exp(v - mx);
  return mx + std::log(z);
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

double log_softmax_at(std::span<const double> logits, int index) {
  return logits[index] - log_sum_exp(logits);
}

double entropy_nats(std::span<const double> logits) {
  check_finite(logits);
  const double lse = log_sum_exp(logits);
  double h = 0.0;
  for (double v : logits) h += std::exp(v - lse) * (lse - v);
  return std::max(0.0, h);
}

CategoricalSample sample_categorical(std::span<const double> logits,
                                     util::Rng& rng) {
  check_finite(logits);
  const double lse = log_sum_exp(logits);
  const double u = rng.uniform();
  double cdf = 0.0;
  const int k = static_cast<int>(logits.size());
  int picked = k - 1;  // guard against cdf rounding just under 1
  for (int i = 0; i < k; ++i) {
    cdf += std::exp(logits[i] - lse);
    if (u < cdf) {
      picked = i;
      break;
    }
  }
  return {picked, logits[picked] - lse};
}

}  // namespace ovml::grad
