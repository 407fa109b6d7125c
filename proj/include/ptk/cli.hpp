#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ptk::cli {

inline constexpr std::string_view tool_version = "0.1.0";

/// Record of one subcommand run, written next to every output file as
/// "<output>.manifest.json".
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::vector<std::string> configs;
  std::vector<std::string> outputs;
  /// Effective settings as a JSON object, serialized.
  std::string settings_json = "{}";
  std::string config_digest;
};

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

/// Digest over the settings and the contents of every config file.
std::string compute_config_digest(const RunManifest& m);

/// Pretty-printed JSON with sorted keys; no timestamps, so reruns are
/// byte-identical.
std::string manifest_json(const RunManifest& m);
void write_manifest_for(const std::string& output_path, const RunManifest& m);

/// Exit codes: 0 success, 1 usage error, 2 data or contract error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ptk::cli
