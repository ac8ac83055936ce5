#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "f2gan/mlp.hpp"

namespace f2gan {

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::size_t step_count = 0;
  double eta = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam(std::size_t param_count, double eta = 2e-4,
                    double beta1 = 0.5, double beta2 = 0.999,
                    double epsilon = 1e-8);

// One bias-corrected update on a flat parameter array.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state);

// Same update applied layer-by-layer to a model.
void adam_step(MLPModel& model, const Gradients& grads, AdamState& state);

}  // namespace f2gan
