// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>

#include "doctest.h"
#include "faqir/error.hpp"
#include "faqir/server_config.hpp"
#include "fixtures.hpp"

using namespace faqir;
using nlohmann::json;

TEST_SUITE("server_config") {
  TEST_CASE("defaults") {
    const auto c = server_config_from_json(json::object());
    CHECK(c.listen == "127.0.0.1:8080");
    CHECK(c.threads == 8);
    CHECK(c.base_encoder.type == "hash");
    CHECK(c.base_encoder.dimension == 384);
    CHECK(c.retrieval.k == 3);
    CHECK(c.retrieval.threshold == doctest::Approx(0.1));
    CHECK(c.tenants.empty());
  }

  TEST_CASE("full document round trip") {
    const json doc{
        {"listen", "0.0.0.0:9000"},
        {"threads", 4},
        {"base_encoder", {{"type", "hash"}, {"dimension", 64}, {"seed", 3}}},
        {"retrieval", {{"k", 5}, {"threshold", 0.2}}},
        {"train", {{"iterations", 500}}},
        {"sampling", {{"cap", 1000}}},
        {"tenants", json::array({{{"id", "a"}, {"faqs", "a.json"}},
                                 {{"id", "b"}, {"faqs", "b.csv"}, {"format", "hint3-csv"}, {"head", "b.bin"},
                                  {"retrieval", {{"k", 1}}}}})},
        {"bench", {{"duration_seconds", 3}}}};
    const auto c = server_config_from_json(doc);
    CHECK(c.threads == 4);
    CHECK(c.base_encoder.dimension == 64);
    CHECK(c.train.iterations == 500);
    CHECK(c.sampling.cap == 1000);
    REQUIRE(c.tenants.size() == 2);
    CHECK_FALSE(c.tenants[0].format.has_value());
    CHECK(c.tenants[1].format == CorpusFormat::kHint3Csv);
    CHECK(c.tenants[1].retrieval->k == 1);
    CHECK(c.tenants[1].retrieval->threshold == doctest::Approx(0.2));
    const auto again = server_config_from_json(to_json(c));
    CHECK(to_json(again) == to_json(c));
  }

  TEST_CASE("errors name the offending field") {
    CHECK_THROWS_WITH_AS(server_config_from_json({{"retrieval", {{"k", "three"}}}}),
                         doctest::Contains("retrieval.k"), Error);
    CHECK_THROWS_WITH_AS(server_config_from_json({{"tenants", json::array({{{"id", "a"}}})}}),
                         doctest::Contains("tenants[0].faqs"), Error);
    CHECK_THROWS_WITH_AS(server_config_from_json({{"tenants", json::array({{{"id", "a"}, {"faqs", "x"}, {"oops", 1}}})}}),
                         doctest::Contains("tenants[0].oops"), Error);
    CHECK_THROWS_WITH_AS(server_config_from_json({{"colour", "red"}}), doctest::Contains("colour"), Error);
    CHECK_THROWS_AS(server_config_from_json({{"listen", "nohost"}}), Error);
    CHECK_THROWS_AS(server_config_from_json({{"base_encoder", {{"type", "gpu"}}}}), Error);
    CHECK_THROWS_AS(server_config_from_json({{"base_encoder", {{"type", "lookup"}}}}), Error);
  }

  TEST_CASE("listen parsing and environment override") {
    const auto a = parse_listen("10.0.0.1:1234");
    CHECK(a.host == "10.0.0.1");
    CHECK(a.port == 1234);
    CHECK_THROWS_AS(parse_listen("host:99999"), Error);
    CHECK_THROWS_AS(parse_listen("host:abc"), Error);
    ServerConfig c;
    ::setenv("FAQIR_LISTEN", "127.0.0.1:7001", 1);
    apply_env_overrides(c);
    ::unsetenv("FAQIR_LISTEN");
    CHECK(c.listen == "127.0.0.1:7001");
  }

  TEST_CASE("files and encoders") {
    faqir::testing::TempDir dir;
    faqir::testing::write_file(dir / "c.json", R"({"threads": 2})");
    CHECK(load_server_config(dir / "c.json").threads == 2);
    faqir::testing::write_file(dir / "bad.json", "{");
    try {
      load_server_config(dir / "bad.json");
      FAIL("expected kParse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
    }
    CHECK_THROWS_AS(load_server_config(dir / "missing.json"), Error);

    BaseEncoderConfig hash;
    hash.dimension = 16;
    const auto enc = make_base_encoder(hash);
    CHECK(enc->dimension() == 16);
    BaseEncoderConfig remote;
    remote.type = "remote";
    remote.url = "http://127.0.0.1:1/embed";
    remote.dimension = 8;
    CHECK(make_base_encoder(remote)->dimension() == 8);
    const auto s = sampling_config_from_json({{"balanced_size", 10}, {"seed", 9}});
    CHECK(s.balanced_size == std::optional<std::size_t>(10));
    CHECK(sampling_config_from_json(to_json(s)).seed == 9);
    CHECK_THROWS_AS(sampling_config_from_json({{"balanced_size", 3}}), Error);
  }
}
