#pragma once

#include <string>
#include <vector>

#include "f2gan/protocol.hpp"

namespace f2gan {

// CSV schema version recorded in the manifest; bump on column changes.
inline constexpr int kMetricsSchemaVersion = 1;

std::string metrics_csv_header(std::size_t num_clients, std::size_t num_modes);
std::string metrics_csv_row(const MetricsRecord& rec);

// RFC-4180 quoting for the rare free-text fields.
std::string csv_quote(const std::string& s);

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRecord>& metrics,
                       std::size_t num_clients, std::size_t num_modes);
void write_lambda_csv(const std::string& path,
                      const std::vector<MetricsRecord>& metrics);
// One JSON object {"x": [...], "iter": n} per line, all dumps concatenated.
void write_samples_ndjson(const std::string& path,
                          const std::vector<SampleDump>& dumps);
void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::vector<std::string>& outputs,
                    double wall_time_seconds, double Z);

}  // namespace f2gan
