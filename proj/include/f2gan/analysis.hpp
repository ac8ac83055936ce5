#pragma once

#include <functional>
#include <vector>

#include "f2gan/datagen.hpp"
#include "f2gan/tensor.hpp"

namespace f2gan {

// Probability masses on the nodes of a shared grid (quadrature weights folded
// in, normalized to sum 1). All theory checks operate on pairs of these over
// the same grid, which is what makes the objective identities exact.
struct DiscreteDensity {
  GridDomain grid;
  std::vector<double> mass;

  void validate() const;
};

// Discretizes an analytic density onto the grid and normalizes.
DiscreteDensity discretize(const GridDomain& grid,
                           const std::function<double(const double*)>& pdf);
DiscreteDensity discretize_uniform_random(const GridDomain& grid,
                                          std::mt19937_64& rng);

void require_same_grid(const DiscreteDensity& a, const DiscreteDensity& b);

// p_i / (p_i + p_g) per cell; 0/0 cells are defined as 0.
std::vector<double> optimal_discriminator(const DiscreteDensity& p_i,
                                          const DiscreteDensity& p_g);

// Convex generator f for the least-squares loss, f(1) = 0, and its closed-form
// second derivative. Requires x >= 0 and 0 < alpha <= 1.
double f_lsgan(double x, double alpha);
double f_lsgan_second_derivative(double x, double alpha);

// Convex generator f for the cross-entropy loss and its second derivative.
double f_bce(double x, double alpha);
double f_bce_second_derivative(double x, double alpha);

struct DivergenceReport {
  double value = 0.0;
  double constant_C = 0.0;
  double alpha = 0.0;
  // Cells where q == 0 < p forced the analytic limit form of the integrand.
  std::size_t limit_cells = 0;
};

DivergenceReport f_divergence_lsgan(const DiscreteDensity& p,
                                    const DiscreteDensity& q, double alpha);
DivergenceReport f_divergence_bce(const DiscreteDensity& p,
                                  const DiscreteDensity& q, double alpha);

// Direct quadrature of the least-squares generator objective given the
// optimal max-discriminator:
//   1/2 * sum (p_max + p_g) * alpha^2 * p_g^2 / (p_max + alpha p_g)^2.
// Independent route used to cross-check the f-divergence identity.
double lsgan_generator_objective(const DiscreteDensity& p_max,
                                 const DiscreteDensity& p_g, double alpha);

// Cross-entropy counterpart:
//   sum [ p_max log(p_max/(p_max+alpha p_g)) + p_g log(alpha p_g/(p_max+alpha p_g)) ].
double bce_generator_objective(const DiscreteDensity& p_max,
                               const DiscreteDensity& p_g, double alpha);

struct Mode {
  std::vector<double> center;
  double radius = 1.0;
};

struct ModeCoverageReport {
  std::vector<double> mass_fractions;  // fraction of samples within each mode
  std::size_t covered_count = 0;       // fractions >= threshold
  double threshold = 0.10;
};

ModeCoverageReport mode_coverage(const Tensor2D& samples,
                                 const std::vector<Mode>& modes,
                                 double threshold = 0.10);

struct EmpiricalDivergence {
  double value = 0.0;
  std::size_t out_of_grid = 0;  // samples clamped to boundary cells
};

// KL(hist(samples) || reference) on the reference grid with additive
// smoothing eps per cell. Requires >= 1000 samples.
EmpiricalDivergence empirical_divergence(const Tensor2D& samples,
                                         const DiscreteDensity& reference,
                                         double eps = 1e-9);

}  // namespace f2gan
