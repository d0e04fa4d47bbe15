// SPDX-License-Identifier: Apache-2.0
#pragma once

// Closed-loop HTTP load generator for the query endpoint. Each virtual user
// sends POST /tenants/{id}/query and waits for the reply before sending the
// next one. Latencies are kept per user and merged after the level ends.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace faqir {

struct LoadProfile {
  std::vector<std::size_t> concurrency_levels{1, 2, 4, 8};
  double duration_seconds = 10.0;  // per level, warmup included
  double warmup_seconds = 2.0;
  // (tenant_id, weight); weights need not sum to 1.
  std::vector<std::pair<std::string, double>> tenant_mix;
  std::vector<std::string> query_pool;
  std::uint64_t seed = 7;
  // A level whose error fraction exceeds this stops the sweep.
  double max_error_rate = 0.05;
  std::chrono::milliseconds request_timeout{5000};

  void validate() const;
};

nlohmann::json to_json(const LoadProfile& p);
LoadProfile load_profile_from_json(const nlohmann::json& j, LoadProfile defaults = {});

struct LevelResult {
  std::size_t concurrency = 0;
  std::size_t requests = 0;  // successes + errors, after warmup
  std::size_t successes = 0;
  std::size_t errors = 0;
  double window_seconds = 0.0;
  double median_ms = 0.0;
  double p90_ms = 0.0;
  double p99_ms = 0.0;
  double rps = 0.0;  // successes / window
  bool error_rate_exceeded = false;
};

struct LoadResult {
  std::string target;
  std::vector<LevelResult> levels;
  // First level whose RPS gain over the previous level is below 5%.
  std::optional<std::size_t> knee;
};

nlohmann::json to_json(const LoadResult& r);

// base_url like "http://127.0.0.1:8080".
LoadResult run_load(const std::string& base_url, const LoadProfile& profile);

// Nearest-rank percentiles: the ceil(q * N)-th smallest sample (q = 0 gives
// the minimum). Throws kInvalidArgument for no samples or q outside [0, 1].
std::vector<double> latency_percentiles(std::span<const double> samples, std::span<const double> qs);

std::optional<std::size_t> find_knee(std::span<const LevelResult> levels, double min_gain = 0.05);

// Fixed-width text table: concurrency, median, p90, RPS, errors.
std::string format_table(const LoadResult& r);

}  // namespace faqir
