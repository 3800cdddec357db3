#pragma once

#include <cstdint>

namespace ovml::grad::kernels {

// Hot numeric loops, shared by the forward ops and their backward rules.
// Every kernel has a serial reference and an OpenMP variant; the public
// entry points dispatch on problem size. Each output element is produced
// by exactly one thread with a fixed-order f64 accumulation, so the two
// variants are bit-identical and results do not depend on thread count.

struct Conv2dDims {
  int c_in, h, w;
  int c_out, kh, kw;
  int stride, pad;
  int out_h() const { return (h + 2 * pad - kh) / stride + 1; }
  int out_w() const { return (w + 2 * pad - kw) / stride + 1; }
};

// out[c_out, oh, ow] = sum_{ci,kh,kw} in[ci, oh*s-p+kh, ow*s-p+kw] * w[co,ci,kh,kw]
void conv2d_forward_serial(double* out, const double* in, const double* w,
                           const double* bias, const Conv2dDims& d);
void conv2d_forward_omp(double* out, const double* in, const double* w,
                        const double* bias, const Conv2dDims& d);
void conv2d_forward(double* out, const double* in, const double* w,
                    const double* bias, const Conv2dDims& d);

void conv2d_backward_input_serial(double* din, const double* dout,
                                  const double* w, const Conv2dDims& d);
void conv2d_backward_input(double* din, const double* dout, const double* w,
                           const Conv2dDims& d);

void conv2d_backward_weights_serial(double* dw, double* dbias,
                                    const double* dout, const double* in,
                                    const Conv2dDims& d);
void conv2d_backward_weights(double* dw, double* dbias, const double* dout,
                             const double* in, const Conv2dDims& d);

// y[o] = sum_i w[o*in_dim + i] * x[i] (+ b[o])
void matvec_forward_serial(double* y, const double* w, const double* x,
                           const double* b, int out_dim, int in_dim);
void matvec_forward_omp(double* y, const double* w, const double* x,
                        const double* b, int out_dim, int in_dim);
void matvec_forward(double* y, const double* w, const double* x,
                    const double* b, int out_dim, int in_dim);

// dw += dy^T x ; dx += W^T dy ; db += dy
void matvec_backward_serial(double* dw, double* dx, double* db,
                            const double* w, const double* x, const double* dy,
                            int out_dim, int in_dim);
void matvec_backward(double* dw, double* dx, double* db, const double* w,
                     const double* x, const double* dy, int out_dim, int in_dim);

}  // namespace ovml::grad::kernels
