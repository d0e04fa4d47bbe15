// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <atomic>
#include <thread>

#include "doctest.h"
#include "faqir/bench.hpp"
#include "faqir/error.hpp"
#include "faqir/rng.hpp"
#include "httplib.h"

using namespace faqir;

namespace {

// Query endpoint that sleeps a fixed time; tenant "broken" answers 500.
class SleepyServer {
 public:
  explicit SleepyServer(std::chrono::milliseconds delay) {
    server_.new_task_queue = [] { return new httplib::ThreadPool(16); };
    server_.set_tcp_nodelay(true);
    server_.Post(R"(/tenants/([^/]+)/query)", [delay, this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      if (req.matches[1] == "broken") {
        res.status = 500;
        return;
      }
      std::this_thread::sleep_for(delay);
      res.set_content(R"({"intent":"x"})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~SleepyServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int hits() const { return hits_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
};

LevelResult level(std::size_t c, double rps) {
  LevelResult l;
  l.concurrency = c;
  l.rps = rps;
  return l;
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("nearest-rank percentiles against a sorting oracle") {
    const double samples[] = {5, 1, 4, 2, 3};
    const double qs[] = {0.0, 0.2, 0.5, 0.9, 1.0};
    CHECK(latency_percentiles(samples, qs) == std::vector<double>{1, 1, 3, 5, 5});
    Rng rng(3);
    std::vector<double> big(997);
    for (auto& x : big) x = rng.uniform01() * 100;
    auto sorted = big;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.01, 0.5, 0.9, 0.99}) {
      const double one[] = {q};
      const auto rank = static_cast<std::size_t>(std::ceil(q * sorted.size()));
      CHECK(latency_percentiles(big, one)[0] == sorted[rank - 1]);
    }
    const double bad[] = {1.5};
    CHECK_THROWS_AS(latency_percentiles(samples, bad), Error);
    CHECK_THROWS_AS(latency_percentiles(std::span<const double>{}, qs), Error);
  }

  TEST_CASE("knee detection") {
    const std::vector<LevelResult> levels{level(1, 100), level(2, 190), level(4, 195), level(8, 300)};
    CHECK(find_knee(levels) == std::optional<std::size_t>(2));
    const std::vector<LevelResult> linear{level(1, 100), level(2, 200)};
    CHECK_FALSE(find_knee(linear).has_value());
  }

  TEST_CASE("profile parsing") {
    const auto p = load_profile_from_json(
        {{"concurrency_levels", {1, 3}}, {"tenant_mix", {{"a", 3.0}, {"b", 1.0}}}, {"query_pool", {"hi"}}});
    CHECK(p.concurrency_levels == std::vector<std::size_t>{1, 3});
    CHECK(p.tenant_mix.size() == 2);
    CHECK(load_profile_from_json(to_json(p)).tenant_mix == p.tenant_mix);
    auto negative = p;
    negative.duration_seconds = -1;
    CHECK_THROWS_AS(negative.validate(), Error);
    CHECK_THROWS_AS(load_profile_from_json({{"warp", 1}}), Error);
  }

  TEST_CASE("measured latency matches a fixed-delay server") {
    SleepyServer server(std::chrono::milliseconds(5));
    LoadProfile p;
    p.concurrency_levels = {1, 4};
    p.duration_seconds = 1.5;
    p.warmup_seconds = 0.3;
    p.tenant_mix = {{"a", 1.0}};
    p.query_pool = {"where is my order"};
    const auto r = run_load(server.url(), p);
    REQUIRE(r.levels.size() == 2);
    for (const auto& l : r.levels) {
      CAPTURE(l.concurrency);
      CHECK(l.errors == 0);
      CHECK(l.successes > 20);
      CHECK(l.median_ms >= 5.0);
      CHECK(l.median_ms < 50.0);
      CHECK(l.p90_ms >= l.median_ms);
      CHECK(l.p99_ms >= l.p90_ms);
      CHECK(l.rps == doctest::Approx(l.successes / l.window_seconds));
    }
    // Closed loop: one user cannot exceed 1 / latency.
    CHECK(r.levels[0].rps <= 1000.0 / 5.0 + 1e-9);
    CHECK(r.levels[1].rps > r.levels[0].rps);
    CHECK(format_table(r).find("p90") != std::string::npos);
    CHECK(to_json(r)["levels"].size() == 2);
  }

  TEST_CASE("error rate stops the sweep") {
    SleepyServer server(std::chrono::milliseconds(1));
    LoadProfile p;
    p.concurrency_levels = {1, 2, 4};
    p.duration_seconds = 0.5;
    p.warmup_seconds = 0.0;
    p.tenant_mix = {{"broken", 1.0}};
    p.query_pool = {"q"};
    const auto r = run_load(server.url(), p);
    REQUIRE(r.levels.size() == 1);
    CHECK(r.levels[0].error_rate_exceeded);
    CHECK(r.levels[0].successes == 0);
  }
}
