#include "f2gan/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace f2gan {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::size_t component_dim(const ComponentDensity& c) {
  return std::holds_alternative<Gaussian1D>(c) ? 1 : 2;
}

void validate_component(const ComponentDensity& c) {
  if (const auto* g = std::get_if<Gaussian1D>(&c)) {
    if (!(g->std > 0.0))
      throw std::invalid_argument("Gaussian1D: std must be > 0");
  } else {
    const auto& g2 = std::get<Gaussian2D>(c);
    const auto& cv = g2.cov;
    if (cv[1] != cv[2])
      throw std::invalid_argument("Gaussian2D: covariance not symmetric");
    const double det = cv[0] * cv[3] - cv[1] * cv[2];
    if (!(cv[0] > 0.0 && det > 0.0))
      throw std::invalid_argument("Gaussian2D: covariance not positive definite");
  }
}

double component_density(const ComponentDensity& c, const double* x) {
  if (const auto* g = std::get_if<Gaussian1D>(&c)) {
    const double z = (x[0] - g->mean) / g->std;
    return std::exp(-0.5 * z * z) / (g->std * std::sqrt(kTwoPi));
  }
  const auto& g2 = std::get<Gaussian2D>(c);
  const auto& cv = g2.cov;
  const double det = cv[0] * cv[3] - cv[1] * cv[2];
  const double dx = x[0] - g2.mean[0];
  const double dy = x[1] - g2.mean[1];
  // quadratic form with the inverse covariance
  const double q =
      (cv[3] * dx * dx - 2.0 * cv[1] * dx * dy + cv[0] * dy * dy) / det;
  return std::exp(-0.5 * q) / (kTwoPi * std::sqrt(det));
}

std::size_t ClientDistribution::dim() const {
  return components.empty() ? 0 : component_dim(components.front());
}

void ClientDistribution::validate() const {
  if (components.empty())
    throw std::invalid_argument("ClientDistribution: no components");
  if (components.size() != weights.size())
    throw std::invalid_argument(
        "ClientDistribution: weights/components length mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("ClientDistribution: weight < 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("ClientDistribution: weights must sum to 1");
  const std::size_t d = component_dim(components.front());
  for (const auto& c : components) {
    validate_component(c);
    if (component_dim(c) != d)
      throw std::invalid_argument("ClientDistribution: mixed dimensions");
  }
}

double density(const ClientDistribution& p, const double* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.components.size(); ++i)
    acc += p.weights[i] * component_density(p.components[i], x);
  return acc;
}

void GridDomain::validate() const {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("GridDomain: dim must be 1 or 2");
  if (!(lower < upper))
    throw std::invalid_argument("GridDomain: lower must be < upper");
  if (points_per_dim < 16)
    throw std::invalid_argument("GridDomain: points_per_dim must be >= 16");
}

std::size_t GridDomain::cell_count() const {
  return dim == 1 ? points_per_dim : points_per_dim * points_per_dim;
}

std::array<double, 2> GridDomain::point(std::size_t c) const {
  const double h = step();
  if (dim == 1) return {lower + h * double(c), 0.0};
  const std::size_t i = c / points_per_dim;
  const std::size_t j = c % points_per_dim;
  return {lower + h * double(i), lower + h * double(j)};
}

double GridDomain::quad_weight(std::size_t c) const {
  const double h = step();
  auto edge_w = [&](std::size_t idx) {
    return (idx == 0 || idx + 1 == points_per_dim) ? 0.5 * h : h;
  };
  if (dim == 1) return edge_w(c);
  return edge_w(c / points_per_dim) * edge_w(c % points_per_dim);
}

GridDomain default_grid(const std::vector<ClientDistribution>& clients,
                        std::size_t points_per_dim, double sigmas) {
  if (clients.empty()) throw std::invalid_argument("default_grid: no clients");
  const std::size_t d = clients.front().dim();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& cl : clients) {
    for (const auto& comp : cl.components) {
      if (const auto* g = std::get_if<Gaussian1D>(&comp)) {
        lo = std::min(lo, g->mean - sigmas * g->std);
        hi = std::max(hi, g->mean + sigmas * g->std);
      } else {
        const auto& g2 = std::get<Gaussian2D>(comp);
        const double s = std::sqrt(std::max(g2.cov[0], g2.cov[3]));
        lo = std::min({lo, g2.mean[0] - sigmas * s, g2.mean[1] - sigmas * s});
        hi = std::max({hi, g2.mean[0] + sigmas * s, g2.mean[1] + sigmas * s});
      }
    }
  }
  GridDomain grid;
  grid.dim = int(d);
  grid.lower = lo;
  grid.upper = hi;
  grid.points_per_dim = points_per_dim ? points_per_dim : (d == 1 ? 4096 : 256);
  grid.validate();
  return grid;
}

double compute_Z(const std::vector<ClientDistribution>& clients,
                 const GridDomain& grid) {
  if (clients.empty()) throw std::invalid_argument("compute_Z: no clients");
  grid.validate();
  double z = 0.0;
  const std::size_t n = grid.cell_count();
  for (std::size_t c = 0; c < n; ++c) {
    const auto pt = grid.point(c);
    double m = 0.0;
    for (const auto& cl : clients) m = std::max(m, density(cl, pt.data()));
    z += grid.quad_weight(c) * m;
  }
  return z;
}

double p_max_density(const std::vector<ClientDistribution>& clients, double Z,
                     const double* x) {
  if (clients.empty())
    throw std::invalid_argument("p_max_density: no clients");
  if (!(Z > 0.0)) throw std::invalid_argument("p_max_density: Z must be > 0");
  double m = 0.0;
  for (const auto& cl : clients) m = std::max(m, density(cl, x));
  return m / Z;
}

Tensor2D sample(const ClientDistribution& p, std::size_t n,
                std::mt19937_64& rng) {
  p.validate();
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const std::size_t d = p.dim();
  Tensor2D out(n, d);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t s = 0; s < n; ++s) {
    // component choice by cumulative weights
    double u = unif(rng);
    std::size_t k = 0;
    for (; k + 1 < p.weights.size(); ++k) {
      if (u < p.weights[k]) break;
      u -= p.weights[k];
    }
    const auto& comp = p.components[k];
    if (const auto* g = std::get_if<Gaussian1D>(&comp)) {
      out(s, 0) = g->mean + g->std * normal(rng);
    } else {
      const auto& g2 = std::get<Gaussian2D>(comp);
      // Cholesky factor of the 2x2 covariance
      const double l11 = std::sqrt(g2.cov[0]);
      const double l21 = g2.cov[1] / l11;
      const double l22 = std::sqrt(g2.cov[3] - l21 * l21);
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      out(s, 0) = g2.mean[0] + l11 * z1;
      out(s, 1) = g2.mean[1] + l21 * z1 + l22 * z2;
    }
  }
  return out;
}

std::vector<ClientDistribution> partition_classes(
    std::size_t K, std::size_t N, PartitionScheme scheme,
    const std::vector<ComponentDensity>& class_densities) {
  if (class_densities.size() != K)
    throw std::invalid_argument("partition_classes: K != class count");
  if (N < 1) throw std::invalid_argument("partition_classes: N must be >= 1");
  std::vector<ClientDistribution> clients(N);
  auto assign = [&](std::size_t client, const std::vector<std::size_t>& ids) {
    ClientDistribution& cl = clients[client];
    const double w = 1.0 / double(ids.size());
    for (std::size_t id : ids) {
      cl.components.push_back(class_densities[id]);
      cl.weights.push_back(w);
    }
  };
  switch (scheme) {
    case PartitionScheme::non_overlapping: {
      if (K % N != 0)
        throw std::invalid_argument(
            "partition_classes: non_overlapping needs K divisible by N");
      const std::size_t per = K / N;
      for (std::size_t i = 0; i < N; ++i) {
        std::vector<std::size_t> ids;
        for (std::size_t k = 0; k < per; ++k) ids.push_back(i * per + k);
        assign(i, ids);
      }
      break;
    }
    case PartitionScheme::moderately_overlapping: {
      if (K % N != 0 || 2 * K / N > K)
        throw std::invalid_argument(
            "partition_classes: moderately_overlapping needs K divisible by N "
            "and 2K/N <= K");
      const std::size_t per = 2 * K / N;
      const std::size_t stride = K / N;
      for (std::size_t i = 0; i < N; ++i) {
        std::vector<std::size_t> ids;
        for (std::size_t k = 0; k < per; ++k)
          ids.push_back((i * stride + k) % K);
        assign(i, ids);
      }
      break;
    }
    case PartitionScheme::fully_overlapping: {
      std::vector<std::size_t> all(K);
      for (std::size_t k = 0; k < K; ++k) all[k] = k;
      for (std::size_t i = 0; i < N; ++i) assign(i, all);
      break;
    }
  }
  for (auto& cl : clients) cl.validate();
  return clients;
}

}  // namespace f2gan
