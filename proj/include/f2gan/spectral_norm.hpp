#pragma once

#include <vector>

#include "f2gan/tensor.hpp"

namespace f2gan {

// Power-iteration state for one weight matrix; u estimates the right singular
// vector (length weight.cols) and stays unit-norm across updates.
struct SpectralNormState {
  std::vector<double> u;
  int power_iterations = 1;
};

SpectralNormState make_spectral_norm_state(std::size_t cols);

struct SpectralNormResult {
  Tensor2D weight;  // input weight divided by the estimated top singular value
  double sigma = 0.0;
};

// Runs state.power_iterations power iterations (updating state.u in place)
// and returns weight / sigma. A zero matrix is returned unchanged with
// sigma = 0 and u untouched.
SpectralNormResult spectral_normalize(const Tensor2D& weight,
                                      SpectralNormState& state);

// Normalization using the stored u without refining it; used where the
// caller must not mutate state (e.g. judging).
SpectralNormResult spectral_normalize_const(const Tensor2D& weight,
                                            const SpectralNormState& state);

}  // namespace f2gan
