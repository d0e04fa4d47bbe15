// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "manifest.hpp"

namespace faqir::cli {

enum ExitCode { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

// Runs one subcommand from its resolved-or-partial config, writing artifacts
// and manifest.json under a fresh run directory below config["out_dir"]
// (default "runs").
RunManifest execute(const std::string& subcommand, const nlohmann::json& config, std::ostream& log);

int run_cli(int argc, char** argv);

}  // namespace faqir::cli
