#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "f2gan/config.hpp"
#include "f2gan/metrics_io.hpp"
#include "f2gan/protocol.hpp"
#include "f2gan/verification.hpp"

namespace fs = std::filesystem;
using namespace f2gan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct RunOutcome {
  TrainingResult result;
  double wall_seconds = 0.0;
};

RunOutcome execute(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome o;
  o.result = run_training(cfg);
  o.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return o;
}

void write_outputs(const RunConfig& cfg, const RunOutcome& o,
                   const fs::path& dir) {
  fs::create_directories(dir);
  const std::vector<std::string> names = {"metrics.csv", "lambda.csv",
                                          "samples.ndjson", "manifest.json"};
  const std::size_t modes = scenario_modes(cfg).size();
  write_metrics_csv((dir / names[0]).string(), o.result.metrics,
                    cfg.data.num_clients, modes);
  write_lambda_csv((dir / names[1]).string(), o.result.metrics);
  write_samples_ndjson((dir / names[2]).string(), o.result.dumps);
  write_manifest((dir / names[3]).string(), cfg, names, o.wall_seconds,
                 o.result.Z);
  for (const auto& w : o.result.warnings)
    std::cerr << "warning: " << w << "\n";
}

int cmd_run(const std::string& config_path, std::optional<std::string> out_dir,
            std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path("out") / cfg.name;
  const RunOutcome o = execute(cfg);
  write_outputs(cfg, o, dir);
  std::cout << "run " << cfg.name << ": " << o.result.metrics.size()
            << " metric rows, final lambda " << o.result.final_lambda
            << ", outputs in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& profile) {
  const double scale = profile == "strict" ? 0.5 : 1.0;
  const auto checks = run_all_checks(scale);
  bool all_pass = true;
  for (const auto& c : checks) {
    std::printf("%s  %-46s measured %.3e  tolerance %.3e\n",
                c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                c.tolerance);
    all_pass = all_pass && c.pass;
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

struct SweepPoint {
  std::string label;
  RunConfig cfg;
};

std::vector<SweepPoint> sweep_points(const RunConfig& base,
                                     const std::string& axis) {
  std::vector<SweepPoint> pts;
  if (axis == "strategy") {
    for (const auto k : {StrategyKind::f2u, StrategyKind::f2a,
                         StrategyKind::mdgan, StrategyKind::gman0}) {
      SweepPoint p{strategy_name(k), base};
      p.cfg.strategy = k;
      pts.push_back(std::move(p));
    }
  } else if (axis == "lambda_fixed") {
    for (const double v : {0.0, 3.6}) {
      SweepPoint p{"lambda_" + std::to_string(v).substr(0, 3), base};
      p.cfg.strategy = StrategyKind::fixed_lambda;
      p.cfg.lambda_fixed = v;
      pts.push_back(std::move(p));
    }
  } else if (axis == "num_clients") {
    for (const std::size_t n : {std::size_t(5), std::size_t(10),
                                std::size_t(20)}) {
      SweepPoint p{"N_" + std::to_string(n), base};
      p.cfg.data.num_clients = n;
      pts.push_back(std::move(p));
    }
  } else if (axis == "overlap") {
    const std::pair<const char*, PartitionScheme> schemes[] = {
        {"non_overlapping", PartitionScheme::non_overlapping},
        {"moderately_overlapping", PartitionScheme::moderately_overlapping},
        {"fully_overlapping", PartitionScheme::fully_overlapping}};
    for (const auto& [name, s] : schemes) {
      SweepPoint p{name, base};
      p.cfg.data.partition = s;
      pts.push_back(std::move(p));
    }
  } else {
    throw ConfigError("unknown sweep axis: " + axis);
  }
  for (auto& p : pts) p.cfg.name = base.name + "_" + p.label;
  return pts;
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              std::optional<std::string> out_dir) {
  const RunConfig base = load_config(config_path);
  const fs::path root =
      out_dir ? fs::path(*out_dir) : fs::path("out") / (base.name + "_sweep");
  fs::create_directories(root);
  std::string table =
      "label,status,final_lambda,covered_count,empirical_divergence,"
      "generator_loss\n";
  bool any_failed = false;
  for (const auto& pt : sweep_points(base, axis)) {
    std::string status = "ok";
    std::string row_tail = ",,,";
    try {
      pt.cfg.validate();
      const RunOutcome o = execute(pt.cfg);
      write_outputs(pt.cfg, o, root / pt.label);
      const MetricsRecord& last = o.result.metrics.back();
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g",
                    o.result.final_lambda, last.covered_count,
                    last.empirical_div, last.generator_loss);
      row_tail = buf;
    } catch (const std::exception& e) {
      status = std::string("failed: ") + e.what();
      any_failed = true;
    }
    table += csv_quote(pt.label) + "," + csv_quote(status) + "," + row_tail +
             "\n";
    std::cout << pt.label << ": " << status << "\n";
  }
  std::ofstream out(root / "comparison.csv", std::ios::binary);
  out << table;
  std::cout << "comparison table: " << (root / "comparison.csv").string()
            << "\n";
  return any_failed ? kExitCheckFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized multi-discriminator GAN simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::string profile = "default";
  std::string axis;

  auto* run = app.add_subcommand("run", "Train from a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the config seed");

  auto* verify = app.add_subcommand("verify", "Run the numerical check suite");
  verify->add_option("--profile", profile, "default or strict")
      ->check(CLI::IsMember({"default", "strict"}));

  auto* sweep = app.add_subcommand("sweep", "Run one config across an axis");
  sweep->add_option("config", config_path, "Config file")->required();
  sweep->add_option("--axis", axis, "strategy|lambda_fixed|num_clients|overlap")
      ->required();
  sweep->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seed);
    if (verify->parsed()) return cmd_verify(profile);
    if (sweep->parsed()) return cmd_sweep(config_path, axis, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}
