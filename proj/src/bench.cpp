// SPDX-License-Identifier: Apache-2.0
#include "faqir/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "faqir/error.hpp"
#include "faqir/rng.hpp"
#include "httplib.h"

namespace faqir {

void LoadProfile::validate() const {
  if (concurrency_levels.empty()) fail(ErrorCode::kInvalidArgument, "bench.concurrency_levels is empty");
  for (auto c : concurrency_levels) {
    if (c == 0) fail(ErrorCode::kInvalidArgument, "bench.concurrency_levels entries must be > 0");
  }
  if (!(warmup_seconds >= 0.0)) fail(ErrorCode::kInvalidArgument, "bench.warmup_seconds must be >= 0");
  if (!(duration_seconds > warmup_seconds)) {
    fail(ErrorCode::kInvalidArgument, "bench.duration_seconds must exceed warmup_seconds");
  }
  if (query_pool.empty()) fail(ErrorCode::kInvalidArgument, "bench.query_pool is empty");
  if (tenant_mix.empty()) fail(ErrorCode::kInvalidArgument, "bench.tenant_mix is empty");
  double total = 0.0;
  for (const auto& [id, w] : tenant_mix) {
    if (!(w >= 0.0)) fail(ErrorCode::kInvalidArgument, "bench.tenant_mix weight for '" + id + "' is negative");
    total += w;
  }
  if (!(total > 0.0)) fail(ErrorCode::kInvalidArgument, "bench.tenant_mix weights sum to zero");
  if (!(max_error_rate >= 0.0 && max_error_rate <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "bench.max_error_rate must be in [0, 1]");
  }
  if (request_timeout.count() <= 0) fail(ErrorCode::kInvalidArgument, "bench.request_timeout_ms must be > 0");
}

nlohmann::json to_json(const LoadProfile& p) {
  auto mix = nlohmann::json::object();
  for (const auto& [id, w] : p.tenant_mix) mix[id] = w;
  return {{"concurrency_levels", p.concurrency_levels},
          {"duration_seconds", p.duration_seconds},
          {"warmup_seconds", p.warmup_seconds},
          {"tenant_mix", mix},
          {"query_pool", p.query_pool},
          {"seed", p.seed},
          {"max_error_rate", p.max_error_rate},
          {"request_timeout_ms", p.request_timeout.count()}};
}

LoadProfile load_profile_from_json(const nlohmann::json& j, LoadProfile p) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "bench: expected an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "concurrency_levels") p.concurrency_levels = value.get<std::vector<std::size_t>>();
      else if (key == "duration_seconds") p.duration_seconds = value.get<double>();
      else if (key == "warmup_seconds") p.warmup_seconds = value.get<double>();
      else if (key == "query_pool") p.query_pool = value.get<std::vector<std::string>>();
      else if (key == "seed") p.seed = value.get<std::uint64_t>();
      else if (key == "max_error_rate") p.max_error_rate = value.get<double>();
      else if (key == "request_timeout_ms") p.request_timeout = std::chrono::milliseconds(value.get<std::int64_t>());
      else if (key == "tenant_mix") {
        p.tenant_mix.clear();
        if (value.is_array()) {
          for (const auto& id : value) p.tenant_mix.emplace_back(id.get<std::string>(), 1.0);
        } else {
          for (const auto& [id, w] : value.items()) p.tenant_mix.emplace_back(id, w.get<double>());
        }
      } else {
        fail(ErrorCode::kInvalidArgument, "bench." + key + ": unknown field");
      }
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::kInvalidArgument, "bench." + key + ": wrong type");
    }
  }
  return p;
}

nlohmann::json to_json(const LoadResult& r) {
  auto levels = nlohmann::json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"concurrency", l.concurrency},
                      {"requests", l.requests},
                      {"successes", l.successes},
                      {"errors", l.errors},
                      {"window_seconds", l.window_seconds},
                      {"median_ms", l.median_ms},
                      {"p90_ms", l.p90_ms},
                      {"p99_ms", l.p99_ms},
                      {"rps", l.rps},
                      {"error_rate_exceeded", l.error_rate_exceeded}});
  }
  return {{"target", r.target},
          {"levels", levels},
          {"knee_concurrency", r.knee ? nlohmann::json(r.levels[*r.knee].concurrency) : nlohmann::json(nullptr)}};
}

std::vector<double> latency_percentiles(std::span<const double> samples, std::span<const double> qs) {
  if (samples.empty()) fail(ErrorCode::kInvalidArgument, "no latency samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<double> out;
  out.reserve(qs.size());
  for (double q : qs) {
    if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::kInvalidArgument, "quantile outside [0, 1]");
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    out.push_back(sorted[rank - 1]);
  }
  return out;
}

std::optional<std::size_t> find_knee(std::span<const LevelResult> levels, double min_gain) {
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double prev = levels[i - 1].rps;
    if (prev <= 0.0) continue;
    if ((levels[i].rps - prev) / prev < min_gain) return i;
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Sample {
  Clock::time_point start;
  double latency_ms;
  bool ok;
};

class TenantPicker {
 public:
  explicit TenantPicker(const std::vector<std::pair<std::string, double>>& mix) {
    double total = 0.0;
    for (const auto& [id, w] : mix) {
      total += w;
      ids_.push_back(id);
      cumulative_.push_back(total);
    }
  }

  const std::string& pick(Rng& rng) const {
    const double x = rng.uniform01() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), ids_.size() - 1);
    return ids_[i];
  }

 private:
  std::vector<std::string> ids_;
  std::vector<double> cumulative_;
};

std::vector<Sample> virtual_user(const std::string& base_url, const LoadProfile& profile,
                                 const TenantPicker& picker, Rng rng, Clock::time_point end) {
  httplib::Client client(base_url);
  client.set_keep_alive(true);
  client.set_tcp_nodelay(true);
  const auto t = profile.request_timeout;
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(t);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(t - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  std::vector<Sample> samples;
  while (Clock::now() < end) {
    const std::string& tenant = picker.pick(rng);
    const std::string& text = profile.query_pool[rng.uniform_index(profile.query_pool.size())];
    const std::string body = nlohmann::json{{"text", text}}.dump();
    const std::string path = "/tenants/" + tenant + "/query";
    const auto start = Clock::now();
    auto res = client.Post(path, body, "application/json");
    const auto stop = Clock::now();
    const bool ok = res && res->status == 200;
    samples.push_back({start, std::chrono::duration<double, std::milli>(stop - start).count(), ok});
    if (!res) {
      // Back off briefly so a dead target does not spin.
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  return samples;
}

LevelResult run_level(const std::string& base_url, const LoadProfile& profile, const TenantPicker& picker,
                      std::size_t level_index, std::size_t concurrency) {
  const auto begin = Clock::now();
  const auto warm_end = begin + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(profile.warmup_seconds));
  const auto end = begin + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(profile.duration_seconds));

  std::vector<std::vector<Sample>> logs(concurrency);
  std::vector<std::thread> users;
  users.reserve(concurrency);
  for (std::size_t u = 0; u < concurrency; ++u) {
    Rng rng = Rng::derive(profile.seed, (static_cast<std::uint64_t>(level_index) << 32) | u);
    users.emplace_back([&, u, rng] { logs[u] = virtual_user(base_url, profile, picker, rng, end); });
  }
  for (auto& t : users) t.join();

  LevelResult r;
  r.concurrency = concurrency;
  std::vector<double> latencies;
  for (const auto& log : logs) {
    for (const auto& s : log) {
      if (s.start < warm_end) continue;
      ++r.requests;
      if (s.ok) {
        ++r.successes;
        latencies.push_back(s.latency_ms);
      } else {
        ++r.errors;
      }
    }
  }
  r.window_seconds = profile.duration_seconds - profile.warmup_seconds;
  r.rps = static_cast<double>(r.successes) / r.window_seconds;
  if (!latencies.empty()) {
    const double qs[] = {0.5, 0.9, 0.99};
    const auto p = latency_percentiles(latencies, qs);
    r.median_ms = p[0];
    r.p90_ms = p[1];
    r.p99_ms = p[2];
  }
  const double error_rate =
      r.requests == 0 ? 1.0 : static_cast<double>(r.errors) / static_cast<double>(r.requests);
  r.error_rate_exceeded = error_rate > profile.max_error_rate;
  return r;
}

}  // namespace

LoadResult run_load(const std::string& base_url, const LoadProfile& profile) {
  profile.validate();
  const TenantPicker picker(profile.tenant_mix);
  LoadResult result;
  result.target = base_url;
  for (std::size_t i = 0; i < profile.concurrency_levels.size(); ++i) {
    result.levels.push_back(run_level(base_url, profile, picker, i, profile.concurrency_levels[i]));
    if (result.levels.back().error_rate_exceeded) break;
  }
  result.knee = find_knee(result.levels);
  return result;
}

std::string format_table(const LoadResult& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %12s %12s %10s %8s\n", "concurrency", "median_ms", "p90_ms",
                "rps", "errors");
  out += line;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    std::snprintf(line, sizeof line, "%-12zu %12.1f %12.1f %10.1f %8zu%s\n", l.concurrency, l.median_ms,
                  l.p90_ms, l.rps, l.errors, r.knee && *r.knee == i ? "  <- knee" : "");
    out += line;
  }
  return out;
}

}  // namespace faqir
