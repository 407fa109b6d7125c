#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "ptk/cli.hpp"
#include "ptk/text_util.hpp"

namespace ptk::cli {

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string compute_config_digest(const RunManifest& m) {
  std::string material = m.subcommand + '\n' + nlohmann::json::parse(m.settings_json).dump() + '\n';
  for (const auto& path : m.configs) {
    material += path + '\n' + read_file(path) + '\n';
  }
  return fnv1a_hex(material);
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["subcommand"] = m.subcommand;
  j["tool_version"] = std::string(tool_version);
  j["inputs"] = m.inputs;
  j["configs"] = m.configs;
  j["outputs"] = m.outputs;
  j["settings"] = nlohmann::json::parse(m.settings_json);
  j["config_digest"] = m.config_digest.empty() ? compute_config_digest(m) : m.config_digest;
  return j.dump(2) + '\n';
}

void write_manifest_for(const std::string& output_path, const RunManifest& m) {
  const std::string path = output_path + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << manifest_json(m);
}

}  // namespace ptk::cli
