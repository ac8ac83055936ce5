#include "f2gan/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace f2gan {

void DiscreteDensity::validate() const {
  grid.validate();
  if (mass.size() != grid.cell_count())
    throw std::invalid_argument("DiscreteDensity: mass size != grid cells");
  double sum = 0.0;
  for (double m : mass) {
    if (m < 0.0) throw std::invalid_argument("DiscreteDensity: negative mass");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("DiscreteDensity: mass must sum to 1");
}

DiscreteDensity discretize(const GridDomain& grid,
                           const std::function<double(const double*)>& pdf) {
  grid.validate();
  DiscreteDensity d;
  d.grid = grid;
  d.mass.resize(grid.cell_count());
  double sum = 0.0;
  for (std::size_t c = 0; c < d.mass.size(); ++c) {
    const auto pt = grid.point(c);
    d.mass[c] = grid.quad_weight(c) * pdf(pt.data());
    sum += d.mass[c];
  }
  if (!(sum > 0.0))
    throw std::invalid_argument("discretize: density integrates to 0 on grid");
  for (double& m : d.mass) m /= sum;
  return d;
}

DiscreteDensity discretize_uniform_random(const GridDomain& grid,
                                          std::mt19937_64& rng) {
  grid.validate();
  DiscreteDensity d;
  d.grid = grid;
  d.mass.resize(grid.cell_count());
  std::uniform_real_distribution<double> unif(0.01, 1.0);
  double sum = 0.0;
  for (double& m : d.mass) {
    m = unif(rng);
    sum += m;
  }
  for (double& m : d.mass) m /= sum;
  return d;
}

void require_same_grid(const DiscreteDensity& a, const DiscreteDensity& b) {
  const GridDomain& g = a.grid;
  const GridDomain& h = b.grid;
  if (g.dim != h.dim || g.lower != h.lower || g.upper != h.upper ||
      g.points_per_dim != h.points_per_dim)
    throw std::invalid_argument("grids differ");
}

std::vector<double> optimal_discriminator(const DiscreteDensity& p_i,
                                          const DiscreteDensity& p_g) {
  require_same_grid(p_i, p_g);
  std::vector<double> d(p_i.mass.size());
  for (std::size_t c = 0; c < d.size(); ++c) {
    const double pi = p_i.mass[c];
    const double pg = p_g.mass[c];
    d[c] = (pi + pg) > 0.0 ? pi / (pi + pg) : 0.0;
  }
  return d;
}

namespace {
void check_f_domain(double x, double alpha) {
  if (!(x >= 0.0))
    throw std::domain_error("f: x must be >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("f: alpha must be in (0, 1]");
}
}  // namespace

double f_lsgan(double x, double alpha) {
  check_f_domain(x, alpha);
  const double d = 1.0 + alpha * x;
  return (x + 1.0) * alpha * alpha * x * x / (d * d) -
         2.0 * alpha * alpha / ((1.0 + alpha) * (1.0 + alpha));
}

double f_lsgan_second_derivative(double x, double alpha) {
  check_f_domain(x, alpha);
  const double d = 1.0 + alpha * x;
  return 2.0 * alpha * alpha * (1.0 + (3.0 - 2.0 * alpha) * x) / (d * d * d * d);
}

double f_bce(double x, double alpha) {
  check_f_domain(x, alpha);
  const double xlogx = x > 0.0 ? x * std::log(x) : 0.0;  // 0*log 0 = 0
  return -(1.0 + x) * std::log(1.0 + alpha * x) + xlogx +
         2.0 * std::log(1.0 + alpha);
}

double f_bce_second_derivative(double x, double alpha) {
  check_f_domain(x, alpha);
  if (x == 0.0) throw std::domain_error("f_bce'': x must be > 0");
  const double d = 1.0 + alpha * x;
  return (1.0 + alpha * alpha * x) / (x * d * d);
}

DivergenceReport f_divergence_lsgan(const DiscreteDensity& p,
                                    const DiscreteDensity& q, double alpha) {
  require_same_grid(p, q);
  DivergenceReport rep;
  rep.alpha = alpha;
  rep.constant_C = -2.0 * alpha * alpha / ((1.0 + alpha) * (1.0 + alpha));
  double acc = 0.0;
  for (std::size_t c = 0; c < p.mass.size(); ++c) {
    const double pc = p.mass[c];
    const double qc = q.mass[c];
    if (qc > 0.0) {
      acc += qc * f_lsgan(pc / qc, alpha);
    } else if (pc > 0.0) {
      // limit of q f(p/q) as q -> 0+: the integrand tends to p
      acc += pc;
      ++rep.limit_cells;
    }
  }
  rep.value = acc;
  return rep;
}

DivergenceReport f_divergence_bce(const DiscreteDensity& p,
                                  const DiscreteDensity& q, double alpha) {
  require_same_grid(p, q);
  DivergenceReport rep;
  rep.alpha = alpha;
  rep.constant_C = 2.0 * std::log(1.0 + alpha) - std::log(alpha);
  double acc = 0.0;
  for (std::size_t c = 0; c < p.mass.size(); ++c) {
    const double pc = p.mass[c];
    const double qc = q.mass[c];
    if (qc > 0.0) {
      acc += qc * f_bce(pc / qc, alpha);
    } else if (pc > 0.0) {
      // limit of q f(p/q) as q -> 0+: -p log(alpha)
      acc += -pc * std::log(alpha);
      ++rep.limit_cells;
    }
  }
  rep.value = acc;
  return rep;
}

double lsgan_generator_objective(const DiscreteDensity& p_max,
                                 const DiscreteDensity& p_g, double alpha) {
  require_same_grid(p_max, p_g);
  double acc = 0.0;
  for (std::size_t c = 0; c < p_max.mass.size(); ++c) {
    const double pm = p_max.mass[c];
    const double pg = p_g.mass[c];
    const double denom = pm + alpha * pg;
    if (denom > 0.0)
      acc += (pm + pg) * alpha * alpha * pg * pg / (denom * denom);
  }
  return 0.5 * acc;
}

double bce_generator_objective(const DiscreteDensity& p_max,
                               const DiscreteDensity& p_g, double alpha) {
  require_same_grid(p_max, p_g);
  double acc = 0.0;
  for (std::size_t c = 0; c < p_max.mass.size(); ++c) {
    const double pm = p_max.mass[c];
    const double pg = p_g.mass[c];
    const double denom = pm + alpha * pg;
    if (pm > 0.0) acc += pm * std::log(pm / denom);
    if (pg > 0.0) acc += pg * std::log(alpha * pg / denom);
  }
  return acc;
}

ModeCoverageReport mode_coverage(const Tensor2D& samples,
                                 const std::vector<Mode>& modes,
                                 double threshold) {
  if (samples.rows == 0)
    throw std::invalid_argument("mode_coverage: empty sample set");
  for (const Mode& m : modes) {
    if (!(m.radius > 0.0))
      throw std::invalid_argument("mode_coverage: radius must be > 0");
    if (m.center.size() != samples.cols)
      throw std::invalid_argument("mode_coverage: center/sample dim mismatch");
  }
  ModeCoverageReport rep;
  rep.threshold = threshold;
  rep.mass_fractions.assign(modes.size(), 0.0);
  for (std::size_t s = 0; s < samples.rows; ++s) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < samples.cols; ++k) {
        const double d = samples(s, k) - modes[m].center[k];
        d2 += d * d;
      }
      if (d2 <= modes[m].radius * modes[m].radius)
        rep.mass_fractions[m] += 1.0;
    }
  }
  for (double& f : rep.mass_fractions) {
    f /= double(samples.rows);
  }
  for (double f : rep.mass_fractions)
    if (f >= threshold) ++rep.covered_count;
  return rep;
}

EmpiricalDivergence empirical_divergence(const Tensor2D& samples,
                                         const DiscreteDensity& reference,
                                         double eps) {
  reference.validate();
  if (samples.rows < 1000)
    throw std::invalid_argument("empirical_divergence: need >= 1000 samples");
  const GridDomain& g = reference.grid;
  if (samples.cols != std::size_t(g.dim))
    throw std::invalid_argument("empirical_divergence: dim mismatch");
  EmpiricalDivergence res;
  const double h = g.step();
  const std::size_t ppd = g.points_per_dim;
  auto node_index = [&](double x) {
    const double t = (x - g.lower) / h;
    long idx = std::lround(t);
    if (idx < 0 || idx >= long(ppd)) {
      ++res.out_of_grid;
      idx = std::clamp(idx, long(0), long(ppd) - 1);
    }
    return std::size_t(idx);
  };
  std::vector<double> hist(reference.mass.size(), 0.0);
  for (std::size_t s = 0; s < samples.rows; ++s) {
    std::size_t c = node_index(samples(s, 0));
    if (g.dim == 2) c = c * ppd + node_index(samples(s, 1));
    hist[c] += 1.0;
  }
  double hsum = 0.0, rsum = 0.0;
  for (std::size_t c = 0; c < hist.size(); ++c) {
    hist[c] = hist[c] / double(samples.rows) + eps;
    hsum += hist[c];
    rsum += reference.mass[c] + eps;
  }
  double kl = 0.0;
  for (std::size_t c = 0; c < hist.size(); ++c) {
    const double p = hist[c] / hsum;
    const double q = (reference.mass[c] + eps) / rsum;
    kl += p * std::log(p / q);
  }
  res.value = kl;
  return res;
}

}  // namespace f2gan
