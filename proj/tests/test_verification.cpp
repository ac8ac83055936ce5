#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "f2gan/aggregation.hpp"
#include "f2gan/gradcheck.hpp"
#include "f2gan/verification.hpp"

using namespace f2gan;

TEST_CASE("all suites pass at default tolerances") {
  for (const auto& c : run_all_checks(1.0)) {
    INFO(c.name << " measured " << c.measured << " tol " << c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("suites report every expected check") {
  const auto checks = run_all_checks(1.0);
  CHECK(checks.size() == 14);
  for (const auto& c : checks) CHECK(!c.name.empty());
}

TEST_CASE("a sign error in the variance gradient is caught") {
  // Mutation sensitivity: feed the checker a deliberately wrong derivative
  // (the negated weighted variance) and require rejection.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  JudgmentBatch j;
  j.values = Tensor2D(3, 4);
  for (double& v : j.values.data) v = d(rng);
  const double lam = 0.8;
  const auto wrong = [&]() {
    auto g = dagg_dlambda(j, lam);
    for (double& v : g) v = -v;  // injected sign error
    return g;
  }();
  const auto fd = finite_diff(
      [&](const std::vector<double>& p) {
        const auto agg = f2a_aggregate(j, p[0]);
        double s = 0.0;
        for (double a : agg) s += a;
        return s;
      },
      {lam});
  double wrong_sum = 0.0;
  for (double v : wrong) wrong_sum += v;
  CHECK(std::abs(wrong_sum - fd[0]) /
            std::max({std::abs(wrong_sum), std::abs(fd[0]), 1e-8}) >
        1e-5);
}

TEST_CASE("strict profile halves tolerances") {
  const auto def = run_all_checks(1.0);
  const auto strict = run_all_checks(0.5);
  REQUIRE(def.size() == strict.size());
  for (std::size_t i = 0; i < def.size(); ++i)
    CHECK(strict[i].tolerance == doctest::Approx(0.5 * def[i].tolerance));
}
