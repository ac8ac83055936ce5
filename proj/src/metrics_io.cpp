#include "f2gan/metrics_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "f2gan/config.hpp"
#include "json.hpp"

namespace f2gan {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    q += c;
    if (c == '"') q += '"';
  }
  q += '"';
  return q;
}

std::string metrics_csv_header(std::size_t num_clients,
                               std::size_t num_modes) {
  std::string h = "iteration,lambda,generator_loss";
  for (std::size_t i = 0; i < num_clients; ++i)
    h += ",disc_loss_" + std::to_string(i);
  for (std::size_t m = 0; m < num_modes; ++m)
    h += ",mode_frac_" + std::to_string(m);
  h += ",covered_count,empirical_divergence";
  return h;
}

std::string metrics_csv_row(const MetricsRecord& rec) {
  std::string row = std::to_string(rec.iteration) + "," + fmt(rec.lambda) +
                    "," + fmt(rec.generator_loss);
  for (double d : rec.disc_losses) row += "," + fmt(d);
  for (double f : rec.mode_fractions) row += "," + fmt(f);
  row += "," + std::to_string(rec.covered_count) + "," +
         fmt(rec.empirical_div);
  return row;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRecord>& metrics,
                       std::size_t num_clients, std::size_t num_modes) {
  auto out = open_out(path);
  out << metrics_csv_header(num_clients, num_modes) << "\n";
  for (const auto& rec : metrics) out << metrics_csv_row(rec) << "\n";
}

void write_lambda_csv(const std::string& path,
                      const std::vector<MetricsRecord>& metrics) {
  auto out = open_out(path);
  out << "iteration,lambda\n";
  for (const auto& rec : metrics)
    out << rec.iteration << "," << fmt(rec.lambda) << "\n";
}

void write_samples_ndjson(const std::string& path,
                          const std::vector<SampleDump>& dumps) {
  auto out = open_out(path);
  for (const SampleDump& d : dumps) {
    for (std::size_t s = 0; s < d.samples.rows; ++s) {
      out << "{\"x\": [";
      for (std::size_t k = 0; k < d.samples.cols; ++k) {
        if (k) out << ", ";
        out << fmt(d.samples(s, k));
      }
      out << "], \"iter\": " << d.iteration << "}\n";
    }
  }
}

void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::vector<std::string>& outputs,
                    double wall_time_seconds, double Z) {
  nlohmann::json j;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  j["config_hash"] = hash;
  j["seed"] = cfg.seed;
  j["strategy"] = strategy_name(cfg.strategy);
  j["scenario"] = cfg.name;
  j["outputs"] = outputs;
  j["schema_version"] = kMetricsSchemaVersion;
  j["wall_time_seconds"] = wall_time_seconds;
  j["Z"] = Z;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace f2gan
