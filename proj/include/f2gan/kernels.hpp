#pragma once

#include <cstddef>

// Low-level arithmetic kernels used by the numeric core. Every kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. The AVX2 variants vectorize across independent outputs and avoid
// FMA contraction, so both backends produce bit-identical results; the
// equivalence tests assert exact equality.
namespace f2gan::kernels {

enum class Backend { scalar, avx2 };

struct Ops {
  // c[m x n] = a[m x k] * b[k x n], all row-major. c is overwritten.
  void (*matmul)(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n);
  // x[r, :] += bias for every row r.
  void (*add_bias)(double* x, const double* bias,
                   std::size_t rows, std::size_t cols);
  void (*relu)(double* x, std::size_t n);
  void (*leaky_relu)(double* x, double slope, std::size_t n);
  // grad[i] *= (act[i] > 0 ? 1 : 0), act is the post-activation value.
  void (*relu_grad)(const double* act, double* grad, std::size_t n);
  void (*leaky_relu_grad)(const double* act, double slope, double* grad,
                          std::size_t n);
  // One bias-corrected Adam update. bc1 = 1 - beta1^t, bc2 = 1 - beta2^t.
  void (*adam_update)(double* param, const double* grad, double* m, double* v,
                      std::size_t n, double beta1, double beta2,
                      double bc1, double bc2, double eta, double eps);
};

bool avx2_supported();
Backend active_backend();
// Returns false (and leaves the backend unchanged) if unsupported on this CPU.
bool set_backend(Backend b);
const char* backend_name(Backend b);

// Active dispatch table.
const Ops& ops();
// Table for a specific backend, for equivalence testing.
const Ops& ops(Backend b);

namespace detail {
const Ops& scalar_ops();
#ifdef F2GAN_HAVE_AVX2_TU
const Ops& avx2_ops();
#endif
}  // namespace detail

}  // namespace f2gan::kernels
