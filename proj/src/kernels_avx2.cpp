// AVX2 kernel variants. This translation unit is the only one compiled with
// -mavx2; callers must check avx2_supported() before dispatching here.
//
// The vector code multiplies then adds (_mm256_mul_pd / _mm256_add_pd, no
// FMA), and vectorizes across independent output elements, so every result
// is bit-identical to the scalar reference.

#include "f2gan/kernels.hpp"

#ifdef F2GAN_HAVE_AVX2_TU

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace f2gan::kernels {
namespace {

void matmul_avx2(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const __m256d av = _mm256_set1_pd(a[i * k + l]);
      const double* brow = b + l * n;
      std::size_t j = 0;
      for (; j < n4; j += 4) {
        __m256d cv = _mm256_loadu_pd(crow + j);
        __m256d bv = _mm256_loadu_pd(brow + j);
        cv = _mm256_add_pd(cv, _mm256_mul_pd(av, bv));
        _mm256_storeu_pd(crow + j, cv);
      }
      const double as = a[i * k + l];
      for (; j < n; ++j) crow[j] += as * brow[j];
    }
  }
}

void add_bias_avx2(double* x, const double* bias,
                   std::size_t rows, std::size_t cols) {
  const std::size_t c4 = cols & ~std::size_t{3};
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = x + i * cols;
    std::size_t j = 0;
    for (; j < c4; j += 4) {
      __m256d rv = _mm256_loadu_pd(row + j);
      __m256d bv = _mm256_loadu_pd(bias + j);
      _mm256_storeu_pd(row + j, _mm256_add_pd(rv, bv));
    }
    for (; j < cols; ++j) row[j] += bias[j];
  }
}

void relu_avx2(double* x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  }
  for (; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void leaky_relu_avx2(double* x, double slope, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sv = _mm256_set1_pd(slope);
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d neg = _mm256_mul_pd(v, sv);
    __m256d mask = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(x + i, _mm256_blendv_pd(neg, v, mask));
  }
  for (; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void relu_grad_avx2(const double* act, double* grad, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d av = _mm256_loadu_pd(act + i);
    __m256d gv = _mm256_loadu_pd(grad + i);
    __m256d mask = _mm256_cmp_pd(av, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad + i, _mm256_and_pd(gv, mask));
  }
  for (; i < n; ++i) {
    if (!(act[i] > 0.0)) grad[i] = 0.0;
  }
}

void leaky_relu_grad_avx2(const double* act, double slope, double* grad,
                          std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sv = _mm256_set1_pd(slope);
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d av = _mm256_loadu_pd(act + i);
    __m256d gv = _mm256_loadu_pd(grad + i);
    __m256d scaled = _mm256_mul_pd(gv, sv);
    __m256d mask = _mm256_cmp_pd(av, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad + i, _mm256_blendv_pd(scaled, gv, mask));
  }
  for (; i < n; ++i) {
    if (!(act[i] > 0.0)) grad[i] *= slope;
  }
}

void adam_update_avx2(double* param, const double* grad, double* m, double* v,
                      std::size_t n, double beta1, double beta2,
                      double bc1, double bc2, double eta, double eps) {
  const __m256d b1 = _mm256_set1_pd(beta1);
  const __m256d b2 = _mm256_set1_pd(beta2);
  const __m256d om1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d om2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d bc1v = _mm256_set1_pd(bc1);
  const __m256d bc2v = _mm256_set1_pd(bc2);
  const __m256d etav = _mm256_set1_pd(eta);
  const __m256d epsv = _mm256_set1_pd(eps);
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d g = _mm256_loadu_pd(grad + i);
    __m256d mv = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    mv = _mm256_add_pd(_mm256_mul_pd(b1, mv), _mm256_mul_pd(om1, g));
    vv = _mm256_add_pd(_mm256_mul_pd(b2, vv),
                       _mm256_mul_pd(om2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    __m256d mhat = _mm256_div_pd(mv, bc1v);
    __m256d vhat = _mm256_div_pd(vv, bc2v);
    __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
    __m256d p = _mm256_loadu_pd(param + i);
    p = _mm256_sub_pd(p, _mm256_mul_pd(etav, _mm256_div_pd(mhat, denom)));
    _mm256_storeu_pd(param + i, p);
  }
  const double som1 = 1.0 - beta1;
  const double som2 = 1.0 - beta2;
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + som1 * g;
    v[i] = beta2 * v[i] + som2 * (g * g);
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= eta * (mhat / (std::sqrt(vhat) + eps));
  }
}

const Ops kAvx2Ops = {
    matmul_avx2,    add_bias_avx2,       relu_avx2,
    leaky_relu_avx2, relu_grad_avx2,     leaky_relu_grad_avx2,
    adam_update_avx2,
};

}  // namespace

const Ops& detail::avx2_ops() { return kAvx2Ops; }

}  // namespace f2gan::kernels

#endif  // F2GAN_HAVE_AVX2_TU
