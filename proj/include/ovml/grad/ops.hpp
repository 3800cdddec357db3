#pragma once

#include <span>
#include <vector>

#include "ovml/grad/tensor.hpp"

namespace ovml::grad {

// Forward ops. Pass tape == nullptr for inference; with a tape, the matching
// backward rule is recorded whenever any input requires a gradient.
//
// There is deliberately no broadcasting beyond bias addition: callers reshape
// explicitly, which keeps every backward rule a few lines.

Tensor add(Tape* tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape* tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape* tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape* tape, const Tensor& a, double c);
Tensor add_const(Tape* tape, const Tensor& a, double c);
Tensor relu(Tape* tape, const Tensor& a);
Tensor exp_elem(Tape* tape, const Tensor& a);
Tensor square(Tape* tape, const Tensor& a);

// elementwise min/max; ties route the gradient to `a`
Tensor min_elem(Tape* tape, const Tensor& a, const Tensor& b);
Tensor max_elem(Tape* tape, const Tensor& a, const Tensor& b);

// clamp to constant bounds; zero gradient outside (lo, hi)
Tensor clamp_const(Tape* tape, const Tensor& a, double lo, double hi);

// y = W x + b with x:[in], W:[out,in], b:[out] (b may be undefined)
Tensor linear(Tape* tape, const Tensor& x, const Tensor& w, const Tensor& b);

// cross-correlation, x:[C_in,H,W], w:[C_out,C_in,kH,kW], bias:[C_out] or undefined
Tensor conv2d(Tape* tape, const Tensor& x, const Tensor& w, const Tensor& bias,
              int stride, int padding);

Tensor flatten(Tape* tape, const Tensor& a);
Tensor concat(Tape* tape, std::span<const Tensor> parts);  // 1-D only

// 1-D logits in, numerically stable
Tensor softmax(Tape* tape, const Tensor& logits);
Tensor log_softmax(Tape* tape, const Tensor& logits);

// Shannon entropy of softmax(logits), in nats
Tensor entropy_of_logits(Tape* tape, const Tensor& logits);

Tensor pick(Tape* tape, const Tensor& a, int index);  // a[index] as scalar

Tensor sum(Tape* tape, const Tensor& a);
Tensor mean(Tape* tape, const Tensor& a);
Tensor sum_scalars(Tape* tape, std::span<const Tensor> scalars);

}  // namespace ovml::grad
