#pragma once

#include <functional>
#include <vector>

namespace f2gan {

// Central-difference gradient estimate of fn at point; O(h^2) error for
// smooth fn. Test oracle, independent of any analytic backward path.
std::vector<double> finite_diff(
    const std::function<double(const std::vector<double>&)>& fn,
    std::vector<double> point, double h = 1e-5);

// max over entries of |a-b| / max(|a|, |b|, floor).
double max_rel_error(const std::vector<double>& a, const std::vector<double>& b,
                     double floor = 1e-8);

}  // namespace f2gan
