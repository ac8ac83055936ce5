#include "f2gan/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace f2gan {

void LossSpec::validate() const {
  if (kind == LossKind::mse) {
    if (y_real != 1.0 || y_real_for_g != 1.0 || y_fake != 0.0)
      throw std::invalid_argument(
          "LossSpec: mse requires y_real = y_real_for_g = 1, y_fake = 0");
  }
}

LossResult loss_and_grad(const LossSpec& spec, const Tensor2D& outputs,
                         double label) {
  LossResult res;
  res.grad = Tensor2D(outputs.rows, outputs.cols);
  const double n = double(outputs.size());
  if (n == 0) throw std::invalid_argument("loss_and_grad: empty outputs");
  double acc = 0.0;
  if (spec.kind == LossKind::mse) {
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      const double d = outputs.data[i] - label;
      acc += 0.5 * d * d;
      res.grad.data[i] = d / n;
    }
  } else {
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      const double o = outputs.data[i];
      if (!(o > 0.0 && o < 1.0))
        throw std::domain_error("loss_and_grad: bce output outside (0,1)");
      acc += -(label * std::log(o) + (1.0 - label) * std::log(1.0 - o));
      res.grad.data[i] = (o - label) / (o * (1.0 - o)) / n;
    }
  }
  res.loss = acc / n;
  return res;
}

}  // namespace f2gan
