// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <chrono>
#include <thread>

#include "doctest.h"
#include "faqir/hash_featurizer.hpp"
#include "faqir/http_service.hpp"
#include "faqir/registry.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace faqir;
using nlohmann::json;

namespace {

struct Fixture {
  Fixture() {
    auto registry = std::make_shared<TenantRegistry>(std::shared_ptr<const BaseEncoder>(hash_featurizer(32, 1)));
    ServiceOptions options;
    options.port = 0;
    options.threads = 4;
    options.train_defaults.iterations = 40;
    options.train_defaults.log_every = 10;
    service = std::make_unique<HttpService>(registry, options);
    port = service->start();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }

  httplib::Result post(const std::string& path, const json& body) {
    return client->Post(path, body.dump(), "application/json");
  }

  std::unique_ptr<HttpService> service;
  int port = 0;
  std::unique_ptr<httplib::Client> client;
};

const json kFaqs = json::array({{{"text", "where is my order"}, {"intent", "shipping"}, {"answer", "In transit."}},
                                {{"text", "track my package"}, {"intent", "shipping"}},
                                {{"text", "i want a refund"}, {"intent", "refund"}},
                                {{"text", "money back please"}, {"intent", "refund"}}});

}  // namespace

TEST_SUITE("http") {
  TEST_CASE("tenant lifecycle over HTTP") {
    Fixture f;
    auto health = f.client->Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(json::parse(health->body)["status"] == "ok");

    auto created = f.post("/tenants", {{"tenant_id", "acme"}, {"faqs", kFaqs}, {"retrieval", {{"k", 2}}}});
    REQUIRE(created);
    CHECK(created->status == 201);
    CHECK(json::parse(created->body)["questions"] == 4);

    auto dup = f.post("/tenants", {{"tenant_id", "acme"}, {"faqs", kFaqs}});
    CHECK(dup->status == 409);

    auto q = f.post("/tenants/acme/query", {{"text", "where is my order"}});
    REQUIRE(q);
    CHECK(q->status == 200);
    const auto body = json::parse(q->body);
    CHECK(body["intent"] == "shipping");
    CHECK(body["answer"] == "In transit.");
    CHECK(body["intents"].size() == 2);
    CHECK(body["head_version"] == 0);

    auto cfg = f.client->Get("/tenants/acme/config");
    CHECK(json::parse(cfg->body)["retrieval"]["k"] == 2);

    auto trained = f.post("/tenants/acme/train?wait=true", {{"iterations", 20}});
    REQUIRE(trained);
    CHECK(trained->status == 200);
    CHECK(json::parse(trained->body)["report"]["head_version"] == 1);

    auto async = f.post("/tenants/acme/train", json::object());
    CHECK(async->status == 202);
    f.service->drain_jobs();
    auto status = f.client->Get("/tenants/acme/train");
    CHECK(json::parse(status->body)["status"] == "succeeded");
    CHECK(json::parse(f.post("/tenants/acme/query", {{"text", "refund"}})->body)["head_version"] == 2);

    auto replaced = f.client->Put("/tenants/acme/faqs",
                                  json{{"faqs", json::array({{{"text", "new"}, {"intent", "n"}}})}}.dump(),
                                  "application/json");
    CHECK(replaced->status == 200);
    CHECK(json::parse(replaced->body)["questions"] == 1);

    auto mem = f.client->Get("/metrics/memory");
    CHECK(mem->status == 200);
    CHECK(json::parse(mem->body)["tenants"] == 1);
  }

  TEST_CASE("error mapping") {
    Fixture f;
    auto missing = f.post("/tenants/ghost/query", {{"text", "x"}});
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["error"] == "not_found");

    auto malformed = f.client->Post("/tenants", "{not json", "application/json");
    CHECK(malformed->status == 400);

    auto no_text = f.post("/tenants", {{"tenant_id", "a"}, {"faqs", kFaqs}});
    CHECK(no_text->status == 201);
    CHECK(f.post("/tenants/a/query", {{"txt", "x"}})->status == 400);
    CHECK(f.post("/tenants/a/train?wait=true", {{"batch_size", 0}})->status == 400);
    CHECK(f.post("/tenants", {{"tenant_id", "b"}, {"faqs", json::array()}})->status == 400);
    CHECK(f.client->Get("/tenants/a/train")->status == 404);
    CHECK(f.client->Get("/nowhere")->status == 404);
    CHECK(f.client->Get("/metrics/memory")->status == 200);
  }

  TEST_CASE("concurrent queries are served") {
    Fixture f;
    f.post("/tenants", {{"tenant_id", "acme"}, {"faqs", kFaqs}});
    std::vector<std::thread> users;
    std::atomic<int> ok{0};
    for (int u = 0; u < 4; ++u) {
      users.emplace_back([&] {
        httplib::Client c("127.0.0.1", f.port);
        for (int i = 0; i < 25; ++i) {
          auto r = c.Post("/tenants/acme/query", R"({"text":"track my package"})", "application/json");
          if (r && r->status == 200) ++ok;
        }
      });
    }
    for (auto& t : users) t.join();
    CHECK(ok == 100);
  }
}
