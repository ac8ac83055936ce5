#pragma once

#include <cstdint>
#include <string>

#include "f2gan/protocol.hpp"

namespace f2gan {

// Thrown on malformed config files; message carries the config path and,
// for syntax errors, the line number.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

// Canonical serialized form of a config (sorted keys, full precision);
// the manifest hash is computed over this string.
std::string canonical_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace f2gan
