#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace f2gan {

// Dense row-major matrix of doubles. Rows are samples, columns are features.
struct Tensor2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor2D() = default;
  Tensor2D(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor2D& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

Tensor2D matmul(const Tensor2D& a, const Tensor2D& b);
Tensor2D transpose(const Tensor2D& t);
bool all_finite(const Tensor2D& t);

}  // namespace f2gan
