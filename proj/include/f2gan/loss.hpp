#pragma once

#include "f2gan/tensor.hpp"

namespace f2gan {

enum class LossKind { mse, bce };

// GAN label configuration. For mse (the least-squares setting) the labels are
// pinned to y_real = y_real_for_g = 1, y_fake = 0.
struct LossSpec {
  LossKind kind = LossKind::mse;
  double y_real = 1.0;
  double y_fake = 0.0;
  double y_real_for_g = 1.0;

  void validate() const;
};

struct LossResult {
  double loss = 0.0;
  Tensor2D grad;  // d(loss)/d(outputs), same shape as outputs
};

// Batch-mean loss of `outputs` against a constant label.
// mse: mean of 0.5*(o - y)^2. bce: mean of -(y*log(o) + (1-y)*log(1-o));
// bce requires outputs strictly inside (0,1) and throws std::domain_error
// otherwise.
LossResult loss_and_grad(const LossSpec& spec, const Tensor2D& outputs,
                         double label);

}  // namespace f2gan
