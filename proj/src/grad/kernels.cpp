#include "ovml/grad/kernels.hpp"

#include <cstring>

namespace ovml::grad::kernels {

namespace {

// Below this many output elements the OpenMP fork costs more than it saves.
constexpr std::int64_t kParallelCutoff = 4096;

inline void conv2d_one_output(double* out, const double* in, const double* w,
                              const double* bias, const Conv2dDims& d, int co,
                              int oh, int ow) {
  const int out_w = d.out_w();
  double acc = bias ? bias[co] : 0.0;
  for (int ci = 0; ci < d.c_in; ++ci) {
    const double* in_c = in + static_cast<std::int64_t>(ci) * d.h * d.w;
    const double* w_c =
        w + (static_cast<std::int64_t>(co) * d.c_in + ci) * d.kh * d.kw;
    for (int kh = 0; kh < d.kh; ++kh) {
      const int ih = oh * d.stride - d.pad + kh;
      if (ih < 0 || ih >= d.h) continue;
      const double* in_row = in_c + static_cast<std::int64_t>(ih) * d.w;
      const double* w_row = w_c + static_cast<std::int64_t>(kh) * d.kw;
      for (int kw = 0; kw < d.kw; ++kw) {
        const int iw = ow * d.stride - d.pad + kw;
        if (iw < 0 || iw >= d.w) continue;
        acc += in_row[iw] * w_row[kw];
      }
    }
  }
  out[(static_cast<std::int64_t>(co) * d.out_h() + oh) * out_w + ow] = acc;
}

inline void conv2d_one_input(double* din, const double* dout, const double* w,
                             const Conv2dDims& d, int ci, int ih, int iw) {
  const int out_h = d.out_h();
  const int out_w = d.out_w();
  double acc = 0.0;
  for (int co = 0; co < d.c_out; ++co) {
    const double* dout_c = dout + static_cast<std::int64_t>(co) * out_h * out_w;
    const double* w_c =
        w + (static_cast<std::int64_t>(co) * d.c_in + ci) * d.kh * d.kw;
    for (int kh = 0; kh < d.kh; ++kh) {
      const int oh_num = ih + d.pad - kh;
      if (oh_num < 0 || oh_num % d.stride != 0) continue;
      const int oh = oh_num / d.stride;
      if (oh >= out_h) continue;
      for (int kw = 0; kw < d.kw; ++kw) {
        const int ow_num = iw + d.pad - kw;
        if (ow_num < 0 || ow_num % d.stride != 0) continue;
        const int ow = ow_num / d.stride;
        if (ow >= out_w) continue;
        acc += dout_c[static_cast<std::int64_t>(oh) * out_w + ow] *
               w_c[static_cast<std::int64_t>(kh) * d.kw + kw];
      }
    }
  }
  din[(static_cast<std::int64_t>(ci) * d.h + ih) * d.w + iw] += acc;
}

inline void conv2d_one_weight(double* dw, const double* dout, const double* in,
                              const Conv2dDims& d, int co, int ci, int kh,
                              int kw) {
  const int out_h = d.out_h();
  const int out_w = d.out_w();
  const double* dout_c = dout + static_cast<std::int64_t>(co) * out_h * out_w;
  const double* in_c = in + static_cast<std::int64_t>(ci) * d.h * d.w;
  double acc = 0.0;
  for (int oh = 0; oh < out_h; ++oh) {
    const int ih = oh * d.stride - d.pad + kh;
    if (ih < 0 || ih >= d.h) continue;
    const double* in_row = in_c + static_cast<std::int64_t>(ih) * d.w;
    const double* dout_row = dout_c + static_cast<std::int64_t>(oh) * out_w;
    for (int ow = 0; ow < out_w; ++ow) {
      const int iw = ow * d.stride - d.pad + kw;
      if (iw < 0 || iw >= d.w) continue;
      acc += dout_row[ow] * in_row[iw];
    }
  }
  dw[((static_cast<std::int64_t>(co) * d.c_in + ci) * d.kh + kh) * d.kw + kw] += acc;
}

}  // namespace

void conv2d_forward_serial(double* out, const double* in, const double* w,
                           const double* bias, const Conv2dDims& d) {
  const int out_h = d.out_h(), out_w = d.out_w();
  for (int co = 0; co < d.c_out; ++co)
    for (int oh = 0; oh < out_h; ++oh)
      for (int ow = 0; ow < out_w; ++ow)
        conv2d_one_output(out, in, w, bias, d, co, oh, ow);
}

void conv2d_forward_omp(double* out, const double* in, const double* w,
                        const double* bias, const Conv2dDims& d) {
  const int out_h = d.out_h(), out_w = d.out_w();
  const std::int64_t total = static_cast<std::int64_t>(d.c_out) * out_h * out_w;
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const int co = static_cast<int>(idx / (out_h * out_w));
    const int rem = static_cast<int>(idx % (out_h * out_w));
    conv2d_one_output(out, in, w, bias, d, co, rem / out_w, rem % out_w);
  }
}

void conv2d_forward(double* out, const double* in, const double* w,
                    const double* bias, const Conv2dDims& d) {
  const std::int64_t work = static_cast<std::int64_t>(d.c_out) * d.out_h() *
                            d.out_w() * d.c_in * d.kh * d.kw;
  if (work >= kParallelCutoff) {
    conv2d_forward_omp(out, in, w, bias, d);
  } else {
    conv2d_forward_serial(out, in, w, bias, d);
  }
}

void conv2d_backward_input_serial(double* din, const double* dout,
                                  const double* w, const Conv2dDims& d) {
  for (int ci = 0; ci < d.c_in; ++ci)
    for (int ih = 0; ih < d.h; ++ih)
      for (int iw = 0; iw < d.w; ++iw)
        conv2d_one_input(din, dout, w, d, ci, ih, iw);
}

void conv2d_backward_input(double* din, const double* dout, const double* w,
                           const Conv2dDims& d) {
  const std::int64_t total = static_cast<std::int64_t>(d.c_in) * d.h * d.w;
  if (total * d.c_out * d.kh * d.kw >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < total; ++idx) {
      const int ci = static_cast<int>(idx / (d.h * d.w));
      const int rem = static_cast<int>(idx % (d.h * d.w));
      conv2d_one_input(din, dout, w, d, ci, rem / d.w, rem % d.w);
    }
  } else {
    conv2d_backward_input_serial(din, dout, w, d);
  }
}

void conv2d_backward_weights_serial(double* dw, double* dbias,
                                    const double* dout, const double* in,
                                    const Conv2dDims& d) {
  for (int co = 0; co < d.c_out; ++co)
    for (int ci = 0; ci < d.c_in; ++ci)
      for (int kh = 0; kh < d.kh; ++kh)
        for (int kw = 0; kw < d.kw; ++kw)
          conv2d_one_weight(dw, dout, in, d, co, ci, kh, kw);
  if (dbias) {
    const int out_hw = d.out_h() * d.out_w();
    for (int co = 0; co < d.c_out; ++co) {
      double acc = 0.0;
      const double* dout_c = dout + static_cast<std::int64_t>(co) * out_hw;
      for (int i = 0; i < out_hw; ++i) acc += dout_c[i];
      dbias[co] += acc;
    }
  }
}

void conv2d_backward_weights(double* dw, double* dbias, const double* dout,
                             const double* in, const Conv2dDims& d) {
  const std::int64_t n_weights =
      static_cast<std::int64_t>(d.c_out) * d.c_in * d.kh * d.kw;
  if (n_weights * d.out_h() * d.out_w() >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < n_weights; ++idx) {
      const int kw = static_cast<int>(idx % d.kw);
      const int kh = static_cast<int>((idx / d.kw) % d.kh);
      const int ci = static_cast<int>((idx / (d.kw * d.kh)) % d.c_in);
      const int co = static_cast<int>(idx / (static_cast<std::int64_t>(d.kw) * d.kh * d.c_in));
      conv2d_one_weight(dw, dout, in, d, co, ci, kh, kw);
    }
    if (dbias) {
      const int out_hw = d.out_h() * d.out_w();
      for (int co = 0; co < d.c_out; ++co) {
        double acc = 0.0;
        const double* dout_c = dout + static_cast<std::int64_t>(co) * out_hw;
        for (int i = 0; i < out_hw; ++i) acc += dout_c[i];
        dbias[co] += acc;
      }
    }
  } else {
    conv2d_backward_weights_serial(dw, dbias, dout, in, d);
  }
}

void matvec_forward_serial(double* y, const double* w, const double* x,
                           const double* b, int out_dim, int in_dim) {
  for (int o = 0; o < out_dim; ++o) {
    const double* row = w + static_cast<std::int64_t>(o) * in_dim;
    double acc = b ? b[o] : 0.0;
    for (int i = 0; i < in_dim; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

void matvec_forward_omp(double* y, const double* w, const double* x,
                        const double* b, int out_dim, int in_dim) {
#pragma omp parallel for schedule(static)
  for (int o = 0; o < out_dim; ++o) {
    const double* row = w + static_cast<std::int64_t>(o) * in_dim;
    double acc = b ? b[o] : 0.0;
    for (int i = 0; i < in_dim; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

void matvec_forward(double* y, const double* w, const double* x,
                    const double* b, int out_dim, int in_dim) {
  if (static_cast<std::int64_t>(out_dim) * in_dim >= kParallelCutoff) {
    matvec_forward_omp(y, w, x, b, out_dim, in_dim);
  } else {
    matvec_forward_serial(y, w, x, b, out_dim, in_dim);
  }
}

void matvec_backward_serial(double* dw, double* dx, double* db,
                            const double* w, const double* x, const double* dy,
                            int out_dim, int in_dim) {
  if (dw) {
    for (int o = 0; o < out_dim; ++o) {
      const double g = dy[o];
      double* dw_row = dw + static_cast<std::int64_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) dw_row[i] += g * x[i];
    }
  }
  if (dx) {
    for (int i = 0; i < in_dim; ++i) {
      double acc = 0.0;
      for (int o = 0; o < out_dim; ++o)
        acc += w[static_cast<std::int64_t>(o) * in_dim + i] * dy[o];
      dx[i] += acc;
    }
  }
  if (db) {
    for (int o = 0; o < out_dim; ++o) db[o] += dy[o];
  }
}

void matvec_backward(double* dw, double* dx, double* db, const double* w,
                     const double* x, const double* dy, int out_dim,
                     int in_dim) {
  const std::int64_t work = static_cast<std::int64_t>(out_dim) * in_dim;
  if (work < kParallelCutoff) {
    matvec_backward_serial(dw, dx, db, w, x, dy, out_dim, in_dim);
    return;
  }
  if (dw) {
#pragma omp parallel for schedule(static)
    for (int o = 0; o < out_dim; ++o) {
      const double g = dy[o];
      double* dw_row = dw + static_cast<std::int64_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) dw_row[i] += g * x[i];
    }
  }
  if (dx) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < in_dim; ++i) {
      double acc = 0.0;
      for (int o = 0; o < out_dim; ++o)
        acc += w[static_cast<std::int64_t>(o) * in_dim + i] * dy[o];
      dx[i] += acc;
    }
  }
  if (db) {
    for (int o = 0; o < out_dim; ++o) db[o] += dy[o];
  }
}

}  // namespace ovml::grad::kernels
