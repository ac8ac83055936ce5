#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "f2gan/aggregation.hpp"
#include "f2gan/gradcheck.hpp"

using namespace f2gan;

namespace {

JudgmentBatch batch_from(std::initializer_list<std::initializer_list<double>>
                             rows) {
  JudgmentBatch j;
  const std::size_t n = rows.size();
  const std::size_t b = rows.begin()->size();
  j.values = Tensor2D(n, b);
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t s = 0;
    for (double v : r) j.values(i, s++) = v;
    ++i;
  }
  return j;
}

}  // namespace

TEST_CASE("f2u_select basics") {
  const auto j = batch_from({{0.2, 0.4}, {0.8, 0.4}, {0.5, 0.1}});
  const auto sel = f2u_select(j);
  CHECK(sel.d_max[0] == 0.8);
  CHECK(sel.argmax[0] == 1);
  // tie breaks to the lowest client index
  CHECK(sel.d_max[1] == 0.4);
  CHECK(sel.argmax[1] == 0);
}

TEST_CASE("f2u_select matches a brute-force scan") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  JudgmentBatch j;
  j.values = Tensor2D(5, 32);
  for (double& v : j.values.data) v = d(rng);
  const auto sel = f2u_select(j);
  for (std::size_t s = 0; s < 32; ++s) {
    double best = j.values(0, s);
    std::size_t bi = 0;
    for (std::size_t i = 1; i < 5; ++i)
      if (j.values(i, s) > best) {
        best = j.values(i, s);
        bi = i;
      }
    CHECK(sel.d_max[s] == best);
    CHECK(sel.argmax[s] == bi);
  }
}

TEST_CASE("softmax weights") {
  const std::vector<double> d{0.2, 0.8};
  const auto w = softmax_weights(d, 1.0);
  CHECK(w[0] == doctest::Approx(0.35434369377420455).epsilon(1e-10));
  CHECK(w[1] == doctest::Approx(0.64565630622579545).epsilon(1e-10));
  CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-15));

  // lambda = 0: exactly uniform
  const auto u = softmax_weights(d, 0.0);
  CHECK(u[0] == 0.5);
  CHECK(u[1] == 0.5);

  // large values do not overflow thanks to max subtraction
  const std::vector<double> big{1000.0, 999.0};
  const auto wb = softmax_weights(big, 5.0);
  CHECK(wb[0] > 0.99);
  CHECK(wb[0] <= 1.0);
}

TEST_CASE("f2a_aggregate") {
  const auto j = batch_from({{0.2, 0.3}, {0.8, 0.3}});
  const auto agg = f2a_aggregate(j, 1.0);
  // 0.2*0.35434 + 0.8*0.64566
  CHECK(agg[0] == doctest::Approx(0.5873937837).epsilon(1e-9));
  // identical clients: equals the common value exactly
  CHECK(agg[1] == 0.3);
  // bounded by min and max
  CHECK(agg[0] >= 0.2);
  CHECK(agg[0] <= 0.8);
}

TEST_CASE("dagg_dlambda is the weighted variance") {
  const auto j = batch_from({{0.0}, {1.0}});
  // lambda=0: weights 1/2, mean 1/2, variance 1/4
  CHECK(dagg_dlambda(j, 0.0)[0] == doctest::Approx(0.25).epsilon(1e-14));
  // non-negative always
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int it = 0; it < 100; ++it) {
    JudgmentBatch jr;
    jr.values = Tensor2D(4, 8);
    for (double& v : jr.values.data) v = d(rng);
    for (double v : dagg_dlambda(jr, 1.3)) CHECK(v >= 0.0);
  }
}

TEST_CASE("lambda_gradient value and gate") {
  const auto j = batch_from({{0.0}, {1.0}});
  LambdaParam lam;
  lam.beta = 0.1;
  lam.lambda_star = 0.0;
  // grad = loss_grad * var + 2*beta*lambda = -0.2*0.25 + 0 = -0.05
  const std::vector<double> lg{-0.2};
  CHECK(lambda_gradient(lg, j, lam) == doctest::Approx(-0.05).epsilon(1e-14));
  lam.lambda_star = 1.0;
  const std::vector<double> col{0.0, 1.0};
  const auto w = softmax_weights(col, 1.0);
  const double mean = w[1];
  const double var = w[0] * mean * mean + w[1] * (1 - mean) * (1 - mean);
  CHECK(lambda_gradient(lg, j, lam) ==
        doctest::Approx(-0.2 * var + 0.2).epsilon(1e-12));
  lam.lambda_star = -0.5;
  CHECK(lambda_gradient(lg, j, lam) == 0.0);
}

TEST_CASE("aggregation gradients match finite differences on random batches") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::uniform_real_distribution<double> ld(0.05, 3.0);
  for (int it = 0; it < 1000; ++it) {
    JudgmentBatch j;
    std::uniform_int_distribution<std::size_t> nd(2, 6), bd(1, 4);
    j.values = Tensor2D(nd(rng), bd(rng));
    for (double& v : j.values.data) v = d(rng);
    const double lam = ld(rng);
    const std::size_t s = 0;
    const auto dl = dagg_dlambda(j, lam);
    const auto fd = finite_diff(
        [&](const std::vector<double>& p) { return f2a_aggregate(j, p[0])[s]; },
        {lam});
    CHECK(std::abs(dl[s] - fd[0]) /
              std::max({std::abs(dl[s]), std::abs(fd[0]), 1e-8}) < 1e-6);
  }
}

TEST_CASE("limits of f2a") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  JudgmentBatch j;
  j.values = Tensor2D(5, 16);
  for (double& v : j.values.data) v = d(rng);

  const auto mean = f2a_aggregate(j, 0.0);
  for (std::size_t s = 0; s < 16; ++s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) sum += j.values(i, s);
    CHECK(mean[s] == sum / 5.0);  // exact
  }

  const auto sel = f2u_select(j);
  for (std::size_t s = 0; s < 16; ++s)
    j.values(sel.argmax[s], s) = sel.d_max[s] + 0.15;  // top-two gap
  const auto sel2 = f2u_select(j);
  const auto hard = f2a_aggregate(j, 1e3);
  for (std::size_t s = 0; s < 16; ++s)
    CHECK(std::abs(hard[s] - sel2.d_max[s]) < 1e-6);
}

TEST_CASE("gman aggregation") {
  // lambda = 0: plain mean of losses
  const std::vector<double> losses{0.2, 0.4, 0.9};
  const auto g0 = gman_aggregate(losses, 0.0);
  CHECK(g0.loss == doctest::Approx(0.5).epsilon(1e-14));
  for (double w : g0.weights) CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-15));

  // positive lambda emphasizes the higher-loss discriminator
  const auto g1 = gman_aggregate(losses, 2.0);
  CHECK(g1.loss > g0.loss);
  CHECK(g1.weights[2] > g1.weights[0]);
  CHECK(std::max_element(g1.weights.begin(), g1.weights.end()) -
            g1.weights.begin() ==
        2);
}

TEST_CASE("mdgan round robin") {
  CHECK(mdgan_schedule(0, 3) == 0);
  CHECK(mdgan_schedule(1, 3) == 1);
  CHECK(mdgan_schedule(5, 3) == 2);
  CHECK(mdgan_schedule(6, 3) == 0);
}

TEST_CASE("strategy names round trip") {
  for (const auto k : {StrategyKind::f2u, StrategyKind::f2a,
                       StrategyKind::mdgan, StrategyKind::gman_star,
                       StrategyKind::gman0, StrategyKind::fixed_lambda,
                       StrategyKind::centralized})
    CHECK(strategy_from_name(strategy_name(k)) == k);
  CHECK_THROWS(strategy_from_name("nope"));
  CHECK(strategy_trains_lambda(StrategyKind::f2a));
  CHECK(strategy_trains_lambda(StrategyKind::gman_star));
  CHECK_FALSE(strategy_trains_lambda(StrategyKind::f2u));
  CHECK_FALSE(strategy_trains_lambda(StrategyKind::gman0));
}
