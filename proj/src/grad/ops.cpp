#include "ovml/grad/ops.hpp"

#include <algorithm>
#include <cmath>

#include "ovml/grad/kernels.hpp"

namespace ovml::grad {

namespace {

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": mismatched shapes " +
                     shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

bool track(Tape* tape, const Tensor& a) {
  return tape != nullptr && a.requires_grad();
}

// result of an op requires grad iff recorded on tape
Tensor out_like(const std::vector<int>& shape, bool requires_grad) {
  return Tensor::zeros(shape, requires_grad);
}

}  // namespace

Tensor add(Tape* tape, const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  const bool rg = track(tape, a) || track(tape, b);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value(), bv = b.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
  if (rg) {
    tape->record([a = a, b = b, out = out]() mutable {
      auto og = out.grad();
      if (a.requires_grad()) {
        auto ag = a.grad();
        for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i];
      }
      if (b.requires_grad()) {
        auto bg = b.grad();
        for (std::size_t i = 0; i < og.size(); ++i) bg[i] += og[i];
      }
    });
  }
  return out;
}

Tensor sub(Tape* tape, const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  const bool rg = track(tape, a) || track(tape, b);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value(), bv = b.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] - bv[i];
  if (rg) {
    tape->record([a = a, b = b, out = out]() mutable {
      auto og = out.grad();
      if (a.requires_grad()) {
        auto ag = a.grad();
        for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i];
      }
      if (b.requires_grad()) {
        auto bg = b.grad();
        for (std::size_t i = 0; i < og.size(); ++i) bg[i] -= og[i];
      }
    });
  }
  return out;
}

Tensor mul(Tape* tape, const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  const bool rg = track(tape, a) || track(tape, b);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value(), bv = b.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
  if (rg) {
    tape->record([a = a, b = b, out = out]() mutable {
      auto og = out.grad();
      auto av = a.value(), bv = b.value();
      if (a.requires_grad()) {
        auto ag = a.grad();
        for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i] * bv[i];
      }
      if (b.requires_grad()) {
        auto bg = b.grad();
        for (std::size_t i = 0; i < og.size(); ++i) bg[i] += og[i] * av[i];
      }
    });
  }
  return out;
}

Tensor scale(Tape* tape, const Tensor& a, double c) {
  const bool rg = track(tape, a);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * c;
  if (rg) {
    tape->record([a = a, out = out, c]() mutable {
      auto og = out.grad();
      auto ag = a.grad();
      for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i] * c;
    });
  }
  return out;
}

Tensor add_const(Tape* tape, const Tensor& a, double c) {
  const bool rg = track(tape, a);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + c;
  if (rg) {
    tape->record([a = a, out = out]() mutable {
      auto og = out.grad();
      auto ag = a.grad();
      for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i];
    });
  }
  return out;
}

Tensor relu(Tape* tape, const Tensor& a) {
  const bool rg = track(tape, a);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] > 0.0 ? av[i] : 0.0;
  if (rg) {
    tape->record([a = a, out = out]() mutable {
      auto og = out.grad();
      auto ag = a.grad();
      auto av = a.value();
      for (std::size_t i = 0; i < og.size(); ++i)
        if (av[i] > 0.0) ag[i] += og[i];
    });
  }
  return out;
}

Tensor exp_elem(Tape* tape, const Tensor& a) {
  const bool rg = track(tape, a);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::exp(av[i]);
  if (rg) {
    tape->record([a = a, out = out]() mutable {
      auto og = out.grad();
      auto ag = a.grad();
      auto ov = out.value();
      for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i] * ov[i];
    });
  }
  return out;
}

Tensor square(Tape* tape, const Tensor& a) {
  const bool rg = track(tape, a);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * av[i];
  if (rg) {
    tape->record([a = a, out = out]() mutable {
      auto og = out.grad();
      auto ag = a.grad();
      auto av = a.value();
      for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i] * 2.0 * av[i];
    });
  }
  return out;
}

Tensor min_elem(Tape* tape, const Tensor& a, const Tensor& b) {
  check_same_shape("min_elem", a, b);
  const bool rg = track(tape, a) || track(tape, b);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value(), bv = b.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] <= bv[i] ? av[i] : bv[i];
  if (rg) {
    tape->record([a = a, b = b, out = out]() mutable {
      auto og = out.grad();
      auto av = a.value(), bv = b.value();
      std::span<double> ag = a.requires_grad() ? a.grad() : std::span<double>{};
      std::span<double> bg = b.requires_grad() ? b.grad() : std::span<double>{};
      for (std::size_t i = 0; i < og.size(); ++i) {
        if (av[i] <= bv[i]) {
          if (!ag.empty()) ag[i] += og[i];
        } else if (!bg.empty()) {
          bg[i] += og[i];
        }
      }
    });
  }
  return out;
}

Tensor max_elem(Tape* tape, const Tensor& a, const Tensor& b) {
  check_same_shape("max_elem", a, b);
  const bool rg = track(tape, a) || track(tape, b);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value(), bv = b.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] >= bv[i] ? av[i] : bv[i];
  if (rg) {
    tape->record([a = a, b = b, out = out]() mutable {
      auto og = out.grad();
      auto av = a.value(), bv = b.value();
      std::span<double> ag = a.requires_grad() ? a.grad() : std::span<double>{};
      std::span<double> bg = b.requires_grad() ? b.grad() : std::span<double>{};
      for (std::size_t i = 0; i < og.size(); ++i) {
        if (av[i] >= bv[i]) {
          if (!ag.empty()) ag[i] += og[i];
        } else if (!bg.empty()) {
          bg[i] += og[i];
        }
      }
    });
  }
  return out;
}

Tensor clamp_const(Tape* tape, const Tensor& a, double lo, double hi) {
  const bool rg = track(tape, a);
  Tensor out = out_like(a.shape(), rg);
  auto av = a.value();
  auto ov = out.value();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::clamp(av[i], lo, hi);
  if (rg) {
    tape->record([a = a, out = out, lo, hi]() mutable {
      auto og = out.grad();
      auto ag = a.grad();
      auto av = a.value();
      for (std::size_t i = 0; i < og.size(); ++i)
        if (av[i] > lo && av[i] < hi) ag[i] += og[i];
    });
  }
  return out;
}

Tensor linear(Tape* tape, const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.rank() != 1 || w.rank() != 2) {
    throw ShapeError("linear: expected x rank 1 and w rank 2, got " +
                     shape_str(x.shape()) + " and " + shape_str(w.shape()));
  }
  const int in_dim = x.extent(0);
  const int out_dim = w.extent(0);
  if (w.extent(1) != in_dim) {
    throw ShapeError("linear: w axis 1 (" + std::to_string(w.extent(1)) +
                     ") != x axis 0 (" + std::to_string(in_dim) + ")");
  }
  if (b.defined() && (b.rank() != 1 || b.extent(0) != out_dim)) {
    throw ShapeError("linear: bias axis 0 (" + shape_str(b.shape()) +
                     ") != w axis 0 (" + std::to_string(out_dim) + ")");
  }
  const bool rg = track(tape, x) || track(tape, w) || (b.defined() && track(tape, b));
  Tensor out = out_like({out_dim}, rg);
  kernels::matvec_forward(out.value().data(), w.value().data(), x.value().data(),
                          b.defined() ? b.value().data() : nullptr, out_dim, in_dim);
  if (rg) {
    tape->record([x = x, w = w, b = b, out = out, out_dim, in_dim]() mutable {
      kernels::matvec_backward(
          w.requires_grad() ? w.grad().data() : nullptr,
          x.requires_grad() ? x.grad().data() : nullptr,
          (b.defined() && b.requires_grad()) ? b.grad().data() : nullptr,
          w.value().data(), x.value().data(), out.grad().data(), out_dim, in_dim);
    });
  }
  return out;
}

Tensor conv2d(Tape* tape, const Tensor& x, const Tensor& w, const Tensor& bias,
              int stride, int padding) {
  if (x.rank() != 3 || w.rank() != 4) {
    throw ShapeError("conv2d: expected input rank 3 and weight rank 4, got " +
                     shape_str(x.shape()) + " and " + shape_str(w.shape()));
  }
  kernels::Conv2dDims d{x.extent(0), x.extent(1), x.extent(2),
                        w.extent(0), w.extent(2), w.extent(3),
                        stride,      padding};
  if (w.extent(1) != d.c_in) {
    throw ShapeError("conv2d: weight axis 1 (" + std::to_string(w.extent(1)) +
                     ") != input axis 0 (" + std::to_string(d.c_in) + ")");
  }
  if (d.kh > d.h + 2 * padding || d.kw > d.w + 2 * padding) {
    throw ShapeError("conv2d: kernel " + std::to_string(d.kh) + "x" +
                     std::to_string(d.kw) + " larger than padded input axes 1,2 of " +
                     shape_str(x.shape()));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.extent(0) != d.c_out)) {
    throw ShapeError("conv2d: bias " + shape_str(bias.shape()) +
                     " != out channels axis 0 (" + std::to_string(d.c_out) + ")");
  }
  if (stride < 1) throw ContractError("conv2d: stride must be >= 1");
  if (padding < 0) throw ContractError("conv2d: padding must be >= 0");

  const bool rg =
      track(tape, x) || track(tape, w) || (bias.defined() && track(tape, bias));
  Tensor out = out_like({d.c_out, d.out_h(), d.out_w()}, rg);
  kernels::conv2d_forward(out.value().data(), x.value().data(), w.value().data(),
                          bias.defined() ? bias.value().data() : nullptr, d);
  if (rg) {
    tape->record([x = x, w = w, bias = bias, out = out, d]() mutable {
      if (x.requires_grad()) {
        kernels::conv2d_backward_input(x.grad().data(), out.grad().data(),
                                       w.value().data(), d);
      }
      if (w.requires_grad()) {
        kernels::conv2d_backward_weights(
            w.grad().data(),
            (bias.defined() && bias.requires_grad()) ? bias.grad().data() : nullptr,
            out.grad().data(), x.value().data(), d);
      }
    });
  }
  return out;
}

Tensor flatten(Tape* tape, const Tensor& a) {
  const bool rg = track(tape, a);
  Tensor out = out_like({static_cast<int>(a.numel())}, rg);
  auto av = a.value();
  auto ov = out.value();
  std::copy(av.begin(), av.end(), ov.begin());
  if (rg) {
    tape->record([a = a, out = out]() mutable {
      auto og = out.grad();
      auto ag = a.grad();
      for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i];
    });
  }
  return out;
}

Tensor concat(Tape* tape, std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat: no inputs");
  std::int64_t total = 0;
  bool rg = false;
  for (const Tensor& p : parts) {
    if (p.rank() != 1) {
      throw ShapeError("concat: all inputs must be rank 1, got " + shape_str(p.shape()));
    }
    total += p.numel();
    rg = rg || track(tape, p);
  }
  Tensor out = out_like({static_cast<int>(total)}, rg);
  auto ov = out.value();
  std::size_t off = 0;
  for (const Tensor& p : parts) {
    auto pv = p.value();
    std::copy(pv.begin(), pv.end(), ov.begin() + off);
    off += pv.size();
  }
  if (rg) {
    std::vector<Tensor> held(parts.begin(), parts.end());
    tape->record([held = std::move(held), out = out]() mutable {
      auto og = out.grad();
      std::size_t off = 0;
      for (Tensor& p : held) {
        if (p.requires_grad()) {
          auto pg = p.grad();
          for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += og[off + i];
        }
        off += static_cast<std::size_t>(p.numel());
      }
    });
  }
  return out;
}

Tensor softmax(Tape* tape, const Tensor& logits) {
  if (logits.rank() != 1) {
    throw ShapeError("softmax: expected rank 1, got " + shape_str(logits.shape()));
  }
  const bool rg = track(tape, logits);
  Tensor out = out_like(logits.shape(), rg);
  auto lv = logits.value();
  auto ov = out.value();
  double mx = lv[0];
  for (double v : lv) mx = std::max(mx, v);
  double z = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    ov[i] = std::exp(lv[i] - mx);
    z += ov[i];
  }
  for (double& v : ov) v /= z;
  if (rg) {
    tape->record([logits = logits, out = out]() mutable {
      auto og = out.grad();
      auto ov = out.value();
      auto lg = logits.grad();
      double dot = 0.0;
      for (std::size_t i = 0; i < og.size(); ++i) dot += og[i] * ov[i];
      for (std::size_t i = 0; i < og.size(); ++i)
        lg[i] += ov[i] * (og[i] - dot);
    });
  }
  return out;
}

Tensor log_softmax(Tape* tape, const Tensor& logits) {
  if (logits.rank() != 1) {
    throw ShapeError("log_softmax: expected rank 1, got " + shape_str(logits.shape()));
  }
  const bool rg = track(tape, logits);
  Tensor out = out_like(logits.shape(), rg);
  auto lv = logits.value();
  auto ov = out.value();
  double mx = lv[0];
  for (double v : lv) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : lv) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  for (std::size_t i = 0; i < lv.size(); ++i) ov[i] = lv[i] - lse;
  if (rg) {
    tape->record([logits = logits, out = out]() mutable {
      auto og = out.grad();
      auto ov = out.value();
      auto lg = logits.grad();
      double gsum = 0.0;
      for (double g : og) gsum += g;
      for (std::size_t i = 0; i < og.size(); ++i)
        lg[i] += og[i] - std::exp(ov[i]) * gsum;
    });
  }
  return out;
}

Tensor entropy_of_logits(Tape* tape, const Tensor& logits) {
  if (logits.rank() != 1) {
    throw ShapeError("entropy_of_logits: expected rank 1, got " +
                     shape_str(logits.shape()));
  }
  const bool rg = track(tape, logits);
  Tensor out = out_like({1}, rg);
  auto lv = logits.value();
  double mx = lv[0];
  for (double v : lv) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : lv) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  double h = 0.0;
  for (double v : lv) h += std::exp(v - lse) * (lse - v);
  out.value()[0] = h;
  if (rg) {
    // dH/dx_j = -p_j (log p_j + H)
    tape->record([logits = logits, out = out, lse, h]() mutable {
      const double g = out.grad()[0];
      auto lv = logits.value();
      auto lg = logits.grad();
      for (std::size_t i = 0; i < lv.size(); ++i) {
        const double logp = lv[i] - lse;
        lg[i] += g * (-std::exp(logp) * (logp + h));
      }
    });
  }
  return out;
}

Tensor pick(Tape* tape, const Tensor& a, int index) {
  if (index < 0 || index >= a.numel()) {
    throw ContractError("pick: index " + std::to_string(index) +
                        " out of range for " + shape_str(a.shape()));
  }
  const bool rg = track(tape, a);
  Tensor out = out_like({1}, rg);
  out.value()[0] = a.value()[static_cast<std::size_t>(index)];
  if (rg) {
    tape->record([a = a, out = out, index]() mutable {
      a.grad()[static_cast<std::size_t>(index)] += out.grad()[0];
    });
  }
  return out;
}

Tensor sum(Tape* tape, const Tensor& a) {
  const bool rg = track(tape, a);
  Tensor out = out_like({1}, rg);
  double acc = 0.0;
  for (double v : a.value()) acc += v;
  out.value()[0] = acc;
  if (rg) {
    tape->record([a = a, out = out]() mutable {
      const double g = out.grad()[0];
      auto ag = a.grad();
      for (double& v : ag) v += g;
    });
  }
  return out;
}

Tensor mean(Tape* tape, const Tensor& a) {
  const double inv = 1.0 / static_cast<double>(a.numel());
  return scale(tape, sum(tape, a), inv);
}

Tensor sum_scalars(Tape* tape, std::span<const Tensor> scalars) {
  if (scalars.empty()) throw ContractError("sum_scalars: no inputs");
  bool rg = false;
  double acc = 0.0;
  for (const Tensor& s : scalars) {
    if (s.numel() != 1) {
      throw ShapeError("sum_scalars: non-scalar input " + shape_str(s.shape()));
    }
    acc += s.value()[0];
    rg = rg || track(tape, s);
  }
  Tensor out = out_like({1}, rg);
  out.value()[0] = acc;
  if (rg) {
    std::vector<Tensor> held(scalars.begin(), scalars.end());
    tape->record([held = std::move(held), out = out]() mutable {
      const double g = out.grad()[0];
      for (Tensor& s : held)
        if (s.requires_grad()) s.grad()[0] += g;
    });
  }
  return out;
}

}  // namespace ovml::grad
