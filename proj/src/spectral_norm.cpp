#include "f2gan/spectral_norm.hpp"

#include <cmath>
#include <stdexcept>

namespace f2gan {
namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// v = W u, w = W^T v, sigma = |W u| refined to v^T W u after normalization.
double estimate_sigma(const Tensor2D& w, std::vector<double>& u, bool refine_u,
                      int iterations) {
  std::vector<double> v(w.rows, 0.0);
  double sigma = 0.0;
  const int iters = refine_u ? iterations : 1;
  for (int it = 0; it < iters; ++it) {
    // v = W u / |W u|
    for (std::size_t i = 0; i < w.rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < w.cols; ++j) s += w(i, j) * u[j];
      v[i] = s;
    }
    const double nv = norm2(v);
    if (nv == 0.0) return 0.0;
    for (double& x : v) x /= nv;
    // u' = W^T v / |W^T v|
    std::vector<double> u2(w.cols, 0.0);
    for (std::size_t i = 0; i < w.rows; ++i)
      for (std::size_t j = 0; j < w.cols; ++j) u2[j] += w(i, j) * v[i];
    const double nu = norm2(u2);
    if (nu == 0.0) return 0.0;
    for (double& x : u2) x /= nu;
    // sigma = v^T W u'
    sigma = 0.0;
    for (std::size_t i = 0; i < w.rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < w.cols; ++j) s += w(i, j) * u2[j];
      sigma += v[i] * s;
    }
    if (refine_u) u = std::move(u2);
  }
  return sigma;
}

}  // namespace

SpectralNormState make_spectral_norm_state(std::size_t cols) {
  SpectralNormState s;
  s.u.assign(cols, 0.0);
  // Deterministic non-degenerate start direction.
  for (std::size_t j = 0; j < cols; ++j) s.u[j] = 1.0 + 0.01 * double(j);
  const double n = norm2(s.u);
  for (double& x : s.u) x /= n;
  return s;
}

SpectralNormResult spectral_normalize(const Tensor2D& weight,
                                      SpectralNormState& state) {
  if (state.u.size() != weight.cols)
    throw std::invalid_argument("spectral_normalize: u length != weight.cols");
  std::vector<double> u = state.u;
  const double sigma = estimate_sigma(weight, u, true, state.power_iterations);
  SpectralNormResult res;
  if (sigma == 0.0) {
    res.weight = weight;
    res.sigma = 0.0;
    return res;  // zero matrix: leave u unchanged
  }
  state.u = std::move(u);
  res.sigma = sigma;
  res.weight = weight;
  for (double& x : res.weight.data) x /= sigma;
  return res;
}

SpectralNormResult spectral_normalize_const(const Tensor2D& weight,
                                            const SpectralNormState& state) {
  if (state.u.size() != weight.cols)
    throw std::invalid_argument("spectral_normalize: u length != weight.cols");
  std::vector<double> u = state.u;
  const double sigma = estimate_sigma(weight, u, false, 1);
  SpectralNormResult res;
  res.sigma = sigma;
  res.weight = weight;
  if (sigma != 0.0)
    for (double& x : res.weight.data) x /= sigma;
  return res;
}

}  // namespace f2gan
