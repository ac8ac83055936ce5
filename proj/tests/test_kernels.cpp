#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <random>
#include <vector>

#include "f2gan/kernels.hpp"

using namespace f2gan::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng,
                               double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar matmul matches a naive reference") {
  std::mt19937_64 rng(1);
  const std::size_t m = 5, k = 7, n = 6;
  const auto a = random_vec(m * k, rng);
  const auto b = random_vec(k * n, rng);
  std::vector<double> c(m * n);
  ops(Backend::scalar).matmul(a.data(), b.data(), c.data(), m, k, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double want = 0.0;
      for (std::size_t l = 0; l < k; ++l) want += a[i * k + l] * b[l * n + j];
      CHECK(c[i * n + j] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("relu and leaky_relu basics") {
  const Ops& o = ops(Backend::scalar);
  std::vector<double> x{-1.0, 0.0, 2.5, -0.5};
  auto y = x;
  o.relu(y.data(), y.size());
  CHECK(y == std::vector<double>{0.0, 0.0, 2.5, 0.0});
  y = x;
  o.leaky_relu(y.data(), 0.2, y.size());
  CHECK(y[0] == doctest::Approx(-0.2));
  CHECK(y[2] == 2.5);
  CHECK(y[3] == doctest::Approx(-0.1));
}

TEST_CASE("backend selection") {
  CHECK(set_backend(Backend::scalar));
  CHECK(active_backend() == Backend::scalar);
  if (avx2_supported()) {
    CHECK(set_backend(Backend::avx2));
    CHECK(active_backend() == Backend::avx2);
  }
  set_backend(avx2_supported() ? Backend::avx2 : Backend::scalar);
}

TEST_CASE("avx2 kernels are bit-identical to scalar") {
  if (!avx2_supported()) return;
  const Ops& s = ops(Backend::scalar);
  const Ops& v = ops(Backend::avx2);
  std::mt19937_64 rng(7);
  // Odd sizes exercise the vector tails.
  for (const std::size_t n : {1ul, 3ul, 4ul, 7ul, 64ul, 129ul}) {
    {
      const auto x0 = random_vec(n, rng);
      auto a = x0, b = x0;
      s.relu(a.data(), n);
      v.relu(b.data(), n);
      CHECK(bitwise_equal(a, b));
      a = x0;
      b = x0;
      s.leaky_relu(a.data(), 0.2, n);
      v.leaky_relu(b.data(), 0.2, n);
      CHECK(bitwise_equal(a, b));
      const auto act = random_vec(n, rng);
      const auto g0 = random_vec(n, rng);
      auto ga = g0, gb = g0;
      s.relu_grad(act.data(), ga.data(), n);
      v.relu_grad(act.data(), gb.data(), n);
      CHECK(bitwise_equal(ga, gb));
      ga = g0;
      gb = g0;
      s.leaky_relu_grad(act.data(), 0.2, ga.data(), n);
      v.leaky_relu_grad(act.data(), 0.2, gb.data(), n);
      CHECK(bitwise_equal(ga, gb));
    }
  }
  for (int it = 0; it < 20; ++it) {
    std::uniform_int_distribution<std::size_t> dim(1, 33);
    const std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
    const auto a = random_vec(m * k, rng);
    const auto b = random_vec(k * n, rng);
    std::vector<double> cs(m * n), cv(m * n);
    s.matmul(a.data(), b.data(), cs.data(), m, k, n);
    v.matmul(a.data(), b.data(), cv.data(), m, k, n);
    CHECK(bitwise_equal(cs, cv));

    const auto bias = random_vec(n, rng);
    auto xs = random_vec(m * n, rng);
    auto xv = xs;
    s.add_bias(xs.data(), bias.data(), m, n);
    v.add_bias(xv.data(), bias.data(), m, n);
    CHECK(bitwise_equal(xs, xv));
  }
  for (int it = 0; it < 20; ++it) {
    std::uniform_int_distribution<std::size_t> dim(1, 200);
    const std::size_t n = dim(rng);
    auto ps = random_vec(n, rng);
    auto pv = ps;
    const auto g = random_vec(n, rng);
    auto ms = random_vec(n, rng, 0.0, 1.0), vs = random_vec(n, rng, 0.0, 1.0);
    auto mv = ms, vv = vs;
    s.adam_update(ps.data(), g.data(), ms.data(), vs.data(), n, 0.5, 0.999,
                  0.5, 0.001, 2e-4, 1e-8);
    v.adam_update(pv.data(), g.data(), mv.data(), vv.data(), n, 0.5, 0.999,
                  0.5, 0.001, 2e-4, 1e-8);
    CHECK(bitwise_equal(ps, pv));
    CHECK(bitwise_equal(ms, mv));
    CHECK(bitwise_equal(vs, vv));
  }
}
