#pragma once

#include <array>
#include <random>
#include <variant>
#include <vector>

#include "f2gan/tensor.hpp"

namespace f2gan {

struct Gaussian1D {
  double mean = 0.0;
  double std = 1.0;
};

struct Gaussian2D {
  std::array<double, 2> mean{0.0, 0.0};
  // Row-major 2x2 covariance; must be symmetric positive definite.
  std::array<double, 4> cov{1.0, 0.0, 0.0, 1.0};
};

using ComponentDensity = std::variant<Gaussian1D, Gaussian2D>;

std::size_t component_dim(const ComponentDensity& c);
double component_density(const ComponentDensity& c, const double* x);
void validate_component(const ComponentDensity& c);

// Mixture over class components; the ground-truth data distribution of one
// client. Weights are nonnegative and sum to 1.
struct ClientDistribution {
  std::vector<ComponentDensity> components;
  std::vector<double> weights;

  std::size_t dim() const;
  void validate() const;
};

double density(const ClientDistribution& p, const double* x);

// Uniform evaluation grid used by the quadrature oracles; dim 1 or 2, the
// same bounds on every axis.
struct GridDomain {
  int dim = 1;
  double lower = -1.0;
  double upper = 1.0;
  std::size_t points_per_dim = 4096;

  void validate() const;
  std::size_t cell_count() const;
  // Node coordinates of cell index c (flattened row-major for dim 2).
  std::array<double, 2> point(std::size_t c) const;
  // Trapezoid quadrature weight of node c.
  double quad_weight(std::size_t c) const;
  double step() const { return (upper - lower) / double(points_per_dim - 1); }
};

// Grid covering every component mean +- 6 sigma (margin widened to `sigmas`).
GridDomain default_grid(const std::vector<ClientDistribution>& clients,
                        std::size_t points_per_dim = 0, double sigmas = 6.0);

// Z = integral of max_i p_i(x) via trapezoid quadrature on the grid.
double compute_Z(const std::vector<ClientDistribution>& clients,
                 const GridDomain& grid);

// p_max(x) = max_i p_i(x) / Z.
double p_max_density(const std::vector<ClientDistribution>& clients, double Z,
                     const double* x);

Tensor2D sample(const ClientDistribution& p, std::size_t n,
                std::mt19937_64& rng);

enum class PartitionScheme {
  non_overlapping,
  moderately_overlapping,
  fully_overlapping
};

// Splits K class components across N clients with uniform within-client
// weights. non_overlapping: client i gets the K/N consecutive classes
// starting at i*K/N. moderately_overlapping: client i gets 2K/N consecutive
// classes starting at i*K/N, wrapping around (adjacent clients share half).
// fully_overlapping: every client gets all classes.
std::vector<ClientDistribution> partition_classes(
    std::size_t K, std::size_t N, PartitionScheme scheme,
    const std::vector<ComponentDensity>& class_densities);

}  // namespace f2gan
