#include "f2gan/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace f2gan {

std::vector<double> finite_diff(
    const std::function<double(const std::vector<double>&)>& fn,
    std::vector<double> point, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff: h must be > 0");
  std::vector<double> grad(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double orig = point[i];
    point[i] = orig + h;
    const double fp = fn(point);
    point[i] = orig - h;
    const double fm = fn(point);
    point[i] = orig;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b,
                     double floor) {
  if (a.size() != b.size())
    throw std::invalid_argument("max_rel_error: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace f2gan
