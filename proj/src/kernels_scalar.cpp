#include "f2gan/kernels.hpp"

#include <cmath>
#include <cstring>

namespace f2gan::kernels {
namespace {

// Loop order i-l-j so each c[i][j] accumulates terms in ascending l; the AVX2
// variant keeps the same per-element order.
void matmul_scalar(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = a[i * k + l];
      const double* brow = b + l * n;
      for (std::size_t j = 0; j < n; ++j) {
        crow[j] += av * brow[j];
      }
    }
  }
}

void add_bias_scalar(double* x, const double* bias,
                     std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = x + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] += bias[j];
  }
}

void relu_scalar(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void leaky_relu_scalar(double* x, double slope, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void relu_grad_scalar(const double* act, double* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!(act[i] > 0.0)) grad[i] = 0.0;
  }
}

void leaky_relu_grad_scalar(const double* act, double slope, double* grad,
                            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!(act[i] > 0.0)) grad[i] *= slope;
  }
}

void adam_update_scalar(double* param, const double* grad, double* m,
                        double* v, std::size_t n, double beta1, double beta2,
                        double bc1, double bc2, double eta, double eps) {
  const double om1 = 1.0 - beta1;
  const double om2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + om1 * g;
    v[i] = beta2 * v[i] + om2 * (g * g);
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= eta * (mhat / (std::sqrt(vhat) + eps));
  }
}

const Ops kScalarOps = {
    matmul_scalar,    add_bias_scalar,       relu_scalar,
    leaky_relu_scalar, relu_grad_scalar,     leaky_relu_grad_scalar,
    adam_update_scalar,
};

}  // namespace

const Ops& detail::scalar_ops() { return kScalarOps; }

}  // namespace f2gan::kernels
