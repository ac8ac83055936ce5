#include "f2gan/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "f2gan/kernels.hpp"

namespace f2gan {

AdamState make_adam(std::size_t param_count, double eta, double beta1,
                    double beta2, double epsilon) {
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("make_adam: betas must be in [0,1)");
  AdamState s;
  s.first_moment.assign(param_count, 0.0);
  s.second_moment.assign(param_count, 0.0);
  s.eta = eta;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state) {
  if (params.size() != grads.size() ||
      params.size() != state.first_moment.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, double(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, double(state.step_count));
  kernels::ops().adam_update(params.data(), grads.data(),
                             state.first_moment.data(),
                             state.second_moment.data(), params.size(),
                             state.beta1, state.beta2, bc1, bc2, state.eta,
                             state.epsilon);
}

void adam_step(MLPModel& model, const Gradients& grads, AdamState& state) {
  if (state.first_moment.size() != model.param_count())
    throw std::invalid_argument("adam_step: state/model size mismatch");
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, double(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, double(state.step_count));
  const auto& k = kernels::ops();
  std::size_t off = 0;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    Layer& l = model.layers[i];
    if (!grads.weights[i].same_shape(l.weight) ||
        grads.biases[i].size() != l.bias.size())
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    k.adam_update(l.weight.data.data(), grads.weights[i].data.data(),
                  state.first_moment.data() + off,
                  state.second_moment.data() + off, l.weight.size(),
                  state.beta1, state.beta2, bc1, bc2, state.eta,
                  state.epsilon);
    off += l.weight.size();
    k.adam_update(l.bias.data(), grads.biases[i].data(),
                  state.first_moment.data() + off,
                  state.second_moment.data() + off, l.bias.size(), state.beta1,
                  state.beta2, bc1, bc2, state.eta, state.epsilon);
    off += l.bias.size();
  }
}

}  // namespace f2gan
