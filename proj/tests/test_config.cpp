#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "f2gan/config.hpp"
#include "f2gan/metrics_io.hpp"

using namespace f2gan;

namespace {

const char* kMinimal = R"({
  "name": "t",
  "data": {
    "dim": 1,
    "classes": [{"mean": -1.0, "std": 0.5}, {"mean": 1.0, "std": 0.5}],
    "num_clients": 2
  }
})";

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const RunConfig cfg = parse_config_text(kMinimal);
  CHECK(cfg.name == "t");
  CHECK(cfg.data.num_clients == 2);
  CHECK(cfg.batch_size == 64);
  CHECK(cfg.lambda_init == 0.1);
  CHECK(cfg.beta == 0.1);
  CHECK(cfg.adam_eta == 2e-4);
  CHECK(cfg.adam_beta1 == 0.5);
  CHECK(cfg.strategy == StrategyKind::f2a);
  CHECK(cfg.loss == LossKind::mse);
  CHECK(cfg.generator.noise_dim == 16);
}

TEST_CASE("syntax errors carry a line number") {
  const std::string broken = "{\n \"name\": \"x\",\n \"oops\n}";
  try {
    parse_config_text(broken, "test.json");
    FAIL("should throw");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("test.json:") != std::string::npos);
    // the unterminated string is noticed at the newline, i.e. line 4
    CHECK(msg.find(":4") != std::string::npos);
  }
}

TEST_CASE("semantic errors are ConfigError") {
  CHECK_THROWS_AS(parse_config_text(R"({"data": {"dim": 3, "classes": []}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_text(
          R"({"loss": "huber", "data": {"dim": 1, "classes": [{"mean": 0, "std": 1}], "num_clients": 1}})"),
      ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"name": "x"})"), ConfigError);
}

TEST_CASE("canonical config and hash are stable") {
  const RunConfig a = parse_config_text(kMinimal);
  const RunConfig b = parse_config_text(kMinimal);
  CHECK(canonical_config(a) == canonical_config(b));
  CHECK(config_hash(a) == config_hash(b));
  RunConfig c = a;
  c.seed = 999;
  CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("csv quoting") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("metrics csv layout") {
  CHECK(metrics_csv_header(2, 3) ==
        "iteration,lambda,generator_loss,disc_loss_0,disc_loss_1,"
        "mode_frac_0,mode_frac_1,mode_frac_2,covered_count,"
        "empirical_divergence");
  MetricsRecord r;
  r.iteration = 100;
  r.lambda = 0.25;
  r.generator_loss = 0.125;
  r.disc_losses = {0.5, 0.75};
  r.mode_fractions = {0.5, 0.25, 0.25};
  r.covered_count = 3;
  r.empirical_div = 0.0625;
  CHECK(metrics_csv_row(r) ==
        "100,0.25,0.125,0.5,0.75,0.5,0.25,0.25,3,0.0625");
}

TEST_CASE("csv round trips doubles exactly") {
  MetricsRecord r;
  r.lambda = 0.1 + 0.2;  // not representable nicely
  r.empirical_div = 1.0 / 3.0;
  const std::string row = metrics_csv_row(r);
  // %.17g is lossless for doubles
  double lam = 0.0;
  std::sscanf(row.c_str(), "0,%lf", &lam);
  CHECK(lam == 0.1 + 0.2);
}

TEST_CASE("written files are byte-stable") {
  std::vector<MetricsRecord> ms(2);
  ms[0].iteration = 1;
  ms[0].disc_losses = {0.1};
  ms[0].mode_fractions = {0.3};
  ms[1] = ms[0];
  ms[1].iteration = 2;
  const std::string p1 = "/tmp/f2gan_test_metrics_a.csv";
  const std::string p2 = "/tmp/f2gan_test_metrics_b.csv";
  write_metrics_csv(p1, ms, 1, 1);
  write_metrics_csv(p2, ms, 1, 1);
  std::ifstream a(p1), b(p2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("wall") == std::string::npos);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
