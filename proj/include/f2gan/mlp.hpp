#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "f2gan/tensor.hpp"

namespace f2gan {

enum class Activation { relu, leaky_relu, tanh, sigmoid, linear };

struct Layer {
  Tensor2D weight;            // [in x out]
  std::vector<double> bias;   // [out]
  Activation act = Activation::linear;
  double slope = 0.2;         // leaky_relu only, must be > 0
};

struct MLPModel {
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.front().weight.rows; }
  std::size_t output_dim() const { return layers.back().weight.cols; }
  std::size_t param_count() const;
  void validate() const;  // throws std::invalid_argument if dims do not chain
};

// Glorot-normal initialized network. hidden_act applies to all hidden layers,
// out_act to the head. out_scale multiplies the head's initial weights only.
MLPModel make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                  std::size_t output_dim, Activation hidden_act,
                  Activation out_act, std::mt19937_64& rng,
                  double slope = 0.2, double out_scale = 1.0);

// Post-activation values per layer; acts[0] is the input batch, acts.back()
// is the network output. Enough to run backward: every activation derivative
// used here is recoverable from the post-activation value.
struct ForwardCache {
  std::vector<Tensor2D> acts;
};

Tensor2D forward(const MLPModel& model, const Tensor2D& batch,
                 ForwardCache* cache = nullptr);

struct Gradients {
  std::vector<Tensor2D> weights;
  std::vector<std::vector<double>> biases;
};

// output_grad is d(loss)/d(output). Returns parameter gradients and writes
// d(loss)/d(input) into input_grad when non-null. Throws std::logic_error if
// the cache does not match the model (stale or foreign cache).
Gradients backward(const MLPModel& model, const ForwardCache& cache,
                   const Tensor2D& output_grad, Tensor2D* input_grad = nullptr);

// Flat views over parameters, used by the optimizer and gradient checks.
std::vector<double> flatten_params(const MLPModel& model);
void unflatten_params(MLPModel& model, const std::vector<double>& flat);
std::vector<double> flatten_grads(const Gradients& g);

}  // namespace f2gan
