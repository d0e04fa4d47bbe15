// SPDX-License-Identifier: Apache-2.0
#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "faqir/error.hpp"
#include "faqir/server_config.hpp"

namespace faqir::cli {

nlohmann::json to_json(const RunManifest& m) {
  return {{"subcommand", m.subcommand},
          {"config", m.config},
          {"seed", m.seed},
          {"dataset_fingerprints", m.dataset_fingerprints},
          {"outputs", m.outputs},
          {"tool_version", m.tool_version}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.dataset_fingerprints = j.at("dataset_fingerprints").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("manifest: ") + e.what());
  }
}

std::filesystem::path create_run_dir(const std::filesystem::path& root, const std::string& subcommand,
                                     const nlohmann::json& config) {
  const std::string text = subcommand + "\n" + config.dump();
  std::uint32_t h = 2166136261u;
  for (unsigned char c : text) {
    h ^= c;
    h *= 16777619u;
  }
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
  char name[64];
  std::snprintf(name, sizeof name, "%s-%08x", stamp, h);

  std::filesystem::create_directories(root);
  std::filesystem::path dir = root / name;
  for (int i = 1; std::filesystem::exists(dir); ++i) dir = root / (std::string(name) + "." + std::to_string(i));
  std::filesystem::create_directory(dir);
  return dir;
}

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m) {
  std::ofstream out(run_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write manifest in " + run_dir.string());
  out << to_json(m).dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_json_file(path));
}

}  // namespace faqir::cli
