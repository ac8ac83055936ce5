#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "f2gan/tensor.hpp"

namespace f2gan {

// Per-sample discriminator outputs and input gradients returned by clients.
// values is [num_clients x batch]; input_grads[i] is [batch x sample_dim].
struct JudgmentBatch {
  Tensor2D values;
  std::vector<Tensor2D> input_grads;

  std::size_t num_clients() const { return values.rows; }
  std::size_t batch() const { return values.cols; }
};

// Trainable aggregation sharpness. The effective lambda is ReLU(lambda_star);
// beta is the strength of the lambda^2 regularizer.
struct LambdaParam {
  double lambda_star = 0.1;
  double beta = 0.1;

  double lambda() const { return std::max(0.0, lambda_star); }
};

enum class StrategyKind {
  f2u,
  f2a,
  mdgan,
  gman_star,
  gman0,
  fixed_lambda,
  centralized
};

struct AggregationStrategy {
  StrategyKind kind = StrategyKind::f2a;
  LambdaParam lam;
  double fixed_value = 0.0;  // fixed_lambda only
};

const char* strategy_name(StrategyKind k);
StrategyKind strategy_from_name(const std::string& name);
bool strategy_trains_lambda(StrategyKind k);

struct F2USelection {
  std::vector<double> d_max;          // per-sample max_i D_i
  std::vector<std::size_t> argmax;    // ties break to the lowest client index
};

F2USelection f2u_select(const JudgmentBatch& j);

// exp(lambda d_i) / sum_j exp(lambda d_j), max-subtracted for stability.
// At lambda == 0 every weight is exactly 1/N.
std::vector<double> softmax_weights(std::span<const double> d, double lambda);

// Per-sample sum_i S_i * D_i. At lambda == 0 this is the exact column mean.
std::vector<double> f2a_aggregate(const JudgmentBatch& j, double lambda);

// d(d_agg)/d(lambda): the softmax-weighted variance of the D_i per sample.
std::vector<double> dagg_dlambda(const JudgmentBatch& j, double lambda);

// d(d_agg)/d(D_i) per sample: S_i + lambda * S_i * (D_i - d_agg). This is the
// exact Jacobian of the softmax-weighted sum, including the coupling that
// arises because every weight depends on every D_j; the finite-difference
// oracle in the tests pins this form.
std::vector<double> dagg_ddi(const JudgmentBatch& j, double lambda,
                             std::size_t client);

// Gradient of the regularized generator objective with respect to
// lambda_star. loss_grad is d(batch-mean loss)/d(d_agg[s]) per sample; the
// ReLU gate zeroes the gradient when lambda_star < 0.
double lambda_gradient(std::span<const double> loss_grad,
                       const JudgmentBatch& j, const LambdaParam& lam);

struct GmanResult {
  double loss = 0.0;
  std::vector<double> weights;  // softmax over per-client losses
};

// Loss-softmax aggregation: higher-loss discriminators are emphasized.
// lambda == 0 reduces to the plain mean of the client losses.
GmanResult gman_aggregate(std::span<const double> client_losses, double lambda);

std::size_t mdgan_schedule(std::size_t round, std::size_t num_clients);

}  // namespace f2gan
