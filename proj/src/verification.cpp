#include "f2gan/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "f2gan/aggregation.hpp"
#include "f2gan/analysis.hpp"
#include "f2gan/datagen.hpp"
#include "f2gan/gradcheck.hpp"
#include "f2gan/loss.hpp"
#include "f2gan/mlp.hpp"

namespace f2gan {

namespace {

JudgmentBatch random_judgment(std::mt19937_64& rng, std::size_t max_clients = 8,
                              std::size_t max_batch = 8) {
  std::uniform_int_distribution<std::size_t> nd(2, max_clients);
  std::uniform_int_distribution<std::size_t> bd(1, max_batch);
  std::uniform_real_distribution<double> vd(-2.0, 2.0);
  JudgmentBatch j;
  j.values = Tensor2D(nd(rng), bd(rng));
  for (double& v : j.values.data) v = vd(rng);
  return j;
}

CheckResult make_check(std::string name, double measured, double tolerance) {
  CheckResult r;
  r.name = std::move(name);
  r.measured = measured;
  r.tolerance = tolerance;
  r.pass = measured <= tolerance;
  return r;
}

double rel_err(double got, double want, double floor = 1e-8) {
  return std::abs(got - want) /
         std::max({std::abs(got), std::abs(want), floor});
}

}  // namespace

std::vector<CheckResult> gradient_check_suite(std::size_t instances,
                                              double tolerance_scale,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  std::uniform_real_distribution<double> lam_dist(0.05, 3.0);

  // d(d_agg)/d(lambda) against central differences in lambda.
  double worst = 0.0;
  for (std::size_t it = 0; it < instances; ++it) {
    const JudgmentBatch j = random_judgment(rng);
    const double lam = lam_dist(rng);
    const auto analytic = dagg_dlambda(j, lam);
    const auto fd = finite_diff(
        [&](const std::vector<double>& p) {
          const auto agg = f2a_aggregate(j, p[0]);
          double sum = 0.0;
          for (double a : agg) sum += a;
          return sum;
        },
        {lam});
    double sum_analytic = 0.0;
    for (double a : analytic) sum_analytic += a;
    worst = std::max(worst, rel_err(sum_analytic, fd[0]));
    // Per-sample check on one random sample via a selector objective.
    std::uniform_int_distribution<std::size_t> sd(0, j.batch() - 1);
    const std::size_t s = sd(rng);
    const auto fd_s = finite_diff(
        [&](const std::vector<double>& p) { return f2a_aggregate(j, p[0])[s]; },
        {lam});
    worst = std::max(worst, rel_err(analytic[s], fd_s[0]));
  }
  out.push_back(make_check("dagg_dlambda vs finite differences", worst,
                           1e-5 * tolerance_scale));

  // d(d_agg)/d(D_i) against finite differences in a single entry of values.
  worst = 0.0;
  for (std::size_t it = 0; it < instances; ++it) {
    JudgmentBatch j = random_judgment(rng);
    const double lam = lam_dist(rng);
    std::uniform_int_distribution<std::size_t> cd(0, j.num_clients() - 1);
    std::uniform_int_distribution<std::size_t> sd(0, j.batch() - 1);
    const std::size_t i = cd(rng);
    const std::size_t s = sd(rng);
    const auto analytic = dagg_ddi(j, lam, i);
    const auto fd = finite_diff(
        [&](const std::vector<double>& p) {
          JudgmentBatch jp = j;
          jp.values(i, s) = p[0];
          return f2a_aggregate(jp, lam)[s];
        },
        {j.values(i, s)});
    worst = std::max(worst, rel_err(analytic[s], fd[0]));
  }
  out.push_back(make_check("dagg_ddi vs finite differences", worst,
                           1e-5 * tolerance_scale));

  // Gradient of the regularized objective with respect to lambda_star, using
  // a random linear functional of d_agg as the loss term.
  worst = 0.0;
  double worst_gate = 0.0;
  std::uniform_real_distribution<double> star_dist(0.05, 2.0);
  std::uniform_real_distribution<double> neg_dist(-2.0, -0.01);
  std::uniform_real_distribution<double> coef_dist(-1.0, 1.0);
  for (std::size_t it = 0; it < instances; ++it) {
    const JudgmentBatch j = random_judgment(rng);
    std::vector<double> coef(j.batch());
    for (double& c : coef) c = coef_dist(rng);
    LambdaParam lam;
    lam.beta = 0.1;
    lam.lambda_star = star_dist(rng);
    const double analytic = lambda_gradient(coef, j, lam);
    const auto fd = finite_diff(
        [&](const std::vector<double>& p) {
          const double eff = std::max(0.0, p[0]);
          const auto agg = f2a_aggregate(j, eff);
          double obj = lam.beta * eff * eff;
          for (std::size_t s = 0; s < agg.size(); ++s) obj += coef[s] * agg[s];
          return obj;
        },
        {lam.lambda_star});
    worst = std::max(worst, rel_err(analytic, fd[0]));
    lam.lambda_star = neg_dist(rng);
    worst_gate = std::max(worst_gate, std::abs(lambda_gradient(coef, j, lam)));
  }
  out.push_back(make_check("lambda_star gradient vs finite differences", worst,
                           1e-5 * tolerance_scale));
  out.push_back(
      make_check("lambda_star gradient gated below zero", worst_gate, 0.0));

  // Full generator gradient through judgment, aggregation and the
  // least-squares generator loss, on a 4-parameter generator.
  worst = 0.0;
  const std::size_t gen_instances = std::max<std::size_t>(1, instances / 50);
  for (std::size_t it = 0; it < gen_instances; ++it) {
    MLPModel gen = make_mlp(1, {1}, 1, Activation::tanh, Activation::linear,
                            rng);
    std::vector<MLPModel> discs;
    for (int i = 0; i < 3; ++i)
      discs.push_back(make_mlp(1, {4}, 1, Activation::tanh,
                               Activation::linear, rng));
    Tensor2D z(6, 1);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (double& v : z.data) v = nd(rng);
    const double lam = lam_dist(rng);
    LossSpec spec;

    const auto objective = [&](const std::vector<double>& theta) {
      MLPModel g = gen;
      unflatten_params(g, theta);
      const Tensor2D x = forward(g, z);
      JudgmentBatch j;
      j.values = Tensor2D(discs.size(), z.rows);
      for (std::size_t i = 0; i < discs.size(); ++i) {
        const Tensor2D d = forward(discs[i], x);
        for (std::size_t s = 0; s < z.rows; ++s) j.values(i, s) = d(s, 0);
      }
      const auto agg = f2a_aggregate(j, lam);
      Tensor2D agg_t(z.rows, 1);
      for (std::size_t s = 0; s < z.rows; ++s) agg_t(s, 0) = agg[s];
      return loss_and_grad(spec, agg_t, spec.y_real_for_g).loss;
    };

    // Analytic route: judge, aggregate, chain through the Jacobian and the
    // discriminator input gradients, then backprop the generator.
    ForwardCache gen_cache;
    const Tensor2D x = forward(gen, z, &gen_cache);
    JudgmentBatch j;
    j.values = Tensor2D(discs.size(), z.rows);
    j.input_grads.resize(discs.size());
    for (std::size_t i = 0; i < discs.size(); ++i) {
      ForwardCache dc;
      const Tensor2D d = forward(discs[i], x, &dc);
      for (std::size_t s = 0; s < z.rows; ++s) j.values(i, s) = d(s, 0);
      Tensor2D ones(z.rows, 1, 1.0);
      Tensor2D in_grad;
      backward(discs[i], dc, ones, &in_grad);
      j.input_grads[i] = in_grad;
    }
    const auto agg = f2a_aggregate(j, lam);
    Tensor2D agg_t(z.rows, 1);
    for (std::size_t s = 0; s < z.rows; ++s) agg_t(s, 0) = agg[s];
    const LossResult lr = loss_and_grad(spec, agg_t, spec.y_real_for_g);
    Tensor2D dldx(z.rows, 1, 0.0);
    for (std::size_t i = 0; i < discs.size(); ++i) {
      const auto jac = dagg_ddi(j, lam, i);
      for (std::size_t s = 0; s < z.rows; ++s)
        dldx(s, 0) += lr.grad(s, 0) * jac[s] * j.input_grads[i](s, 0);
    }
    const Gradients g = backward(gen, gen_cache, dldx);
    const auto analytic = flatten_grads(g);
    const auto fd = finite_diff(objective, flatten_params(gen));
    worst = std::max(worst, max_rel_error(analytic, fd));
  }
  out.push_back(make_check("generator gradient vs finite differences", worst,
                           1e-4 * tolerance_scale));
  return out;
}

std::vector<CheckResult> identity_check_suite(std::size_t pairs,
                                              double tolerance_scale,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  // Pointwise max over the per-client optimal discriminators equals the
  // single optimal discriminator against the scaled max density.
  double worst = 0.0;
  {
    std::uniform_real_distribution<double> mean_dist(-4.0, 4.0);
    std::uniform_real_distribution<double> std_dist(0.3, 1.5);
    std::uniform_int_distribution<std::size_t> nd(2, 5);
    for (std::size_t it = 0; it < 20; ++it) {
      const std::size_t n = nd(rng);
      std::vector<ClientDistribution> clients(n);
      for (auto& c : clients) {
        c.components = {Gaussian1D{mean_dist(rng), std_dist(rng)}};
        c.weights = {1.0};
      }
      ClientDistribution gen;
      gen.components = {Gaussian1D{mean_dist(rng), std_dist(rng)}};
      gen.weights = {1.0};
      GridDomain grid = default_grid(clients, 512);
      const double Z = compute_Z(clients, grid);
      const double alpha = 1.0 / Z;
      for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const auto pt = grid.point(c);
        const double pg = density(gen, pt.data());
        double lhs = 0.0;
        for (const auto& cl : clients) {
          const double pi = density(cl, pt.data());
          if (pi + pg > 0.0) lhs = std::max(lhs, pi / (pi + pg));
        }
        const double pm = p_max_density(clients, Z, pt.data());
        const double denom = pm + alpha * pg;
        const double rhs = denom > 0.0 ? pm / denom : 0.0;
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  out.push_back(make_check("optimal discriminator max identity", worst,
                           1e-12 * tolerance_scale));

  // Objective/f-divergence identities on random discrete density pairs.
  double worst_ls = 0.0, worst_bce = 0.0;
  std::uniform_int_distribution<std::size_t> bins(64, 4096);
  std::uniform_real_distribution<double> alpha_dist(0.05, 1.0);
  for (std::size_t it = 0; it < pairs; ++it) {
    GridDomain grid;
    grid.dim = 1;
    grid.lower = -1.0;
    grid.upper = 1.0;
    grid.points_per_dim = bins(rng);
    const DiscreteDensity pm = discretize_uniform_random(grid, rng);
    const DiscreteDensity pg = discretize_uniform_random(grid, rng);
    const double alpha = alpha_dist(rng);
    const DivergenceReport ls = f_divergence_lsgan(pg, pm, alpha);
    const double ls_direct = lsgan_generator_objective(pm, pg, alpha);
    worst_ls = std::max(
        worst_ls, std::abs(0.5 * ls.value - 0.5 * ls.constant_C - ls_direct));
    const DivergenceReport bc = f_divergence_bce(pg, pm, alpha);
    const double bce_direct = bce_generator_objective(pm, pg, alpha);
    worst_bce =
        std::max(worst_bce, std::abs(bc.value - bc.constant_C - bce_direct));
  }
  out.push_back(make_check("least-squares objective identity", worst_ls,
                           1e-10 * tolerance_scale));
  out.push_back(make_check("cross-entropy objective identity", worst_bce,
                           1e-10 * tolerance_scale));

  // f(1) = 0 and convexity of both generator functions.
  double worst_one = 0.0;
  double worst_convex = 0.0;  // most negative second derivative, flipped
  double worst_fd = 0.0;
  for (const double alpha : {0.1, 0.5, 1.0}) {
    worst_one = std::max(worst_one, std::abs(f_lsgan(1.0, alpha)));
    worst_one = std::max(worst_one, std::abs(f_bce(1.0, alpha)));
    for (int k = 0; k <= 1000; ++k) {
      const double x = 10.0 * k / 1000.0;
      worst_convex =
          std::max(worst_convex, -f_lsgan_second_derivative(x, alpha));
      if (x > 0.0)
        worst_convex =
            std::max(worst_convex, -f_bce_second_derivative(x, alpha));
    }
    for (int k = 0; k < 50; ++k) {
      const double x = 0.1 + 4.9 * k / 49.0;
      const double h = 1e-4;
      const double fd_ls =
          (f_lsgan(x + h, alpha) - 2.0 * f_lsgan(x, alpha) +
           f_lsgan(x - h, alpha)) /
          (h * h);
      worst_fd = std::max(
          worst_fd, rel_err(f_lsgan_second_derivative(x, alpha), fd_ls, 1e-4));
      const double fd_bce =
          (f_bce(x + h, alpha) - 2.0 * f_bce(x, alpha) + f_bce(x - h, alpha)) /
          (h * h);
      worst_fd = std::max(
          worst_fd, rel_err(f_bce_second_derivative(x, alpha), fd_bce, 1e-4));
    }
  }
  out.push_back(make_check("f(1) = 0", worst_one, 1e-15 * tolerance_scale));
  out.push_back(make_check("f convexity on [0, 10]", worst_convex, 0.0));
  out.push_back(make_check("f'' vs second differences", worst_fd,
                           1e-4 * tolerance_scale));
  return out;
}

std::vector<CheckResult> limit_check_suite(double tolerance_scale,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  // lambda = 0 must reproduce the arithmetic column mean bit for bit.
  double worst_mean = 0.0;
  for (int it = 0; it < 200; ++it) {
    const JudgmentBatch j = random_judgment(rng);
    const auto agg = f2a_aggregate(j, 0.0);
    for (std::size_t s = 0; s < j.batch(); ++s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < j.num_clients(); ++i) sum += j.values(i, s);
      worst_mean =
          std::max(worst_mean, std::abs(agg[s] - sum / double(j.num_clients())));
    }
  }
  out.push_back(make_check("lambda = 0 equals the mean exactly", worst_mean,
                           0.0));

  // Large lambda converges to the per-sample max when the top two entries
  // are separated.
  double worst_max = 0.0;
  double worst_argmax = 0.0;
  for (int it = 0; it < 200; ++it) {
    JudgmentBatch j = random_judgment(rng);
    const auto sel = f2u_select(j);
    for (std::size_t s = 0; s < j.batch(); ++s) {
      // Enforce a top-two gap of at least 0.1.
      j.values(sel.argmax[s], s) = sel.d_max[s] + 0.1;
    }
    const auto sel2 = f2u_select(j);
    const auto agg = f2a_aggregate(j, 1e3);
    for (std::size_t s = 0; s < j.batch(); ++s)
      worst_max = std::max(worst_max, std::abs(agg[s] - sel2.d_max[s]));
    for (const double lam : {0.5, 2.0, 10.0}) {
      for (std::size_t s = 0; s < j.batch(); ++s) {
        std::vector<double> col(j.num_clients());
        for (std::size_t i = 0; i < j.num_clients(); ++i)
          col[i] = j.values(i, s);
        const auto w = softmax_weights(col, lam);
        const std::size_t wi =
            std::max_element(w.begin(), w.end()) - w.begin();
        if (wi != sel2.argmax[s]) worst_argmax += 1.0;
      }
    }
  }
  out.push_back(make_check("large lambda matches the per-sample max",
                           worst_max, 1e-6 * tolerance_scale));
  out.push_back(make_check("softmax argmax agrees with the max selection",
                           worst_argmax, 0.0));
  return out;
}

std::vector<CheckResult> run_all_checks(double tolerance_scale,
                                        std::uint64_t seed) {
  std::vector<CheckResult> all = gradient_check_suite(1000, tolerance_scale,
                                                      seed);
  auto ids = identity_check_suite(100, tolerance_scale, seed + 1);
  all.insert(all.end(), ids.begin(), ids.end());
  auto lims = limit_check_suite(tolerance_scale, seed + 2);
  all.insert(all.end(), lims.begin(), lims.end());
  return all;
}

}  // namespace f2gan
