// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace faqir::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string subcommand;
  nlohmann::json config;  // fully resolved; replaying it reruns the command
  std::uint64_t seed = 0;
  std::map<std::string, std::string> dataset_fingerprints;
  std::vector<std::string> outputs;
  std::string tool_version = kToolVersion;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

// <root>/<UTC yyyymmddThhmmssZ>-<8 hex of the config hash>, created fresh.
std::filesystem::path create_run_dir(const std::filesystem::path& root, const std::string& subcommand,
                                     const nlohmann::json& config);

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace faqir::cli
