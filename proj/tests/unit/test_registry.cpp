// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <thread>

#include "doctest.h"
#include "faqir/error.hpp"
#include "faqir/hash_featurizer.hpp"
#include "faqir/registry.hpp"
#include "faqir/synthetic.hpp"
#include "fixtures.hpp"

using namespace faqir;

namespace {

std::shared_ptr<const BaseEncoder> shared_base(std::size_t dim = 32) {
  return std::shared_ptr<const BaseEncoder>(hash_featurizer(dim, 1));
}

TrainConfig short_training() {
  TrainConfig c;
  c.iterations = 60;
  c.log_every = 10;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_SUITE("registry") {
  TEST_CASE("registration and zero-shot exact match") {
    TenantRegistry reg(shared_base());
    reg.register_tenant("acme", faqir::testing::toy_corpus("ignored"));
    CHECK(reg.size() == 1);
    CHECK(reg.tenant_ids() == std::vector<std::string>{"acme"});
    const auto r = reg.handle_query("acme", "where is my order");
    CHECK(r.tenant_id == "acme");
    REQUIRE(r.intent.has_value());
    CHECK(*r.intent == "shipping");
    CHECK(r.score == doctest::Approx(1.0).epsilon(1e-5));
    CHECK_FALSE(r.is_oos);
    CHECK(r.head_version == 0);
    CHECK(reg.snapshot("acme")->corpus->tenant_id() == "acme");

    CHECK(code_of([&] { reg.register_tenant("acme", faqir::testing::toy_corpus()); }) == ErrorCode::kConflict);
    CHECK(code_of([&] { reg.handle_query("nobody", "x"); }) == ErrorCode::kNotFound);
    CHECK(code_of([&] { reg.register_tenant("", faqir::testing::toy_corpus()); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("answers and OOS responses") {
    TenantRegistry reg(shared_base());
    std::vector<FaqEntry> faqs{{QuestionId{0}, "opening hours", "hours", "9 to 5"},
                               {QuestionId{1}, "shipping cost", "shipping", std::nullopt}};
    reg.register_tenant("shop", FaqCorpus("shop", faqs));
    const auto hit = reg.handle_query("shop", "opening hours");
    CHECK(hit.answer == std::optional<std::string>("9 to 5"));
    reg.set_config("shop", RetrievalConfig{3, 1.0});
    const auto miss = reg.handle_query("shop", "quantum chromodynamics lecture");
    CHECK(miss.is_oos);
    CHECK_FALSE(miss.intent.has_value());
    CHECK_FALSE(miss.answer.has_value());
    CHECK_FALSE(miss.suggestions.empty());
    const auto j = to_json(miss);
    CHECK(j["is_oos"] == true);
    CHECK(j.contains("suggestions"));
  }

  TEST_CASE("training publishes increasing versions") {
    TenantRegistry reg(shared_base());
    reg.register_tenant("t", faqir::testing::toy_corpus());
    const auto v0 = reg.version();
    const auto first = reg.train_tenant("t", short_training());
    CHECK(first.head_version == 1);
    const auto second = reg.train_tenant("t", short_training());
    CHECK(second.head_version == 2);
    const auto snap = reg.snapshot("t");
    CHECK(snap->head.version == 2);
    CHECK(snap->index.head_version == 2);
    CHECK(reg.version() == v0 + 2);
    CHECK(reg.handle_query("t", "where is my order").head_version == 2);
  }

  TEST_CASE("failed training keeps the previous head serving") {
    TenantRegistry reg(shared_base());
    reg.register_tenant("t", faqir::testing::toy_corpus());
    const auto before = reg.snapshot("t");
    TrainHooks hooks;
    hooks.on_gradients = [](std::size_t step, HeadGradients& g) {
      if (step == 5) g.weight[0] = std::nanf("");
    };
    CHECK(code_of([&] { reg.train_tenant("t", short_training(), {}, hooks); }) == ErrorCode::kNumerical);
    const auto after = reg.snapshot("t");
    CHECK(after == before);
    CHECK(after->head.weight == before->head.weight);
    CHECK(reg.handle_query("t", "refund").head_version == 0);
  }

  TEST_CASE("swap_head checks versions") {
    auto base = shared_base();
    TenantRegistry reg(base);
    const auto corpus = faqir::testing::toy_corpus("t");
    reg.register_tenant("t", corpus);
    auto head = head_init(32, 32, 77, 0.05f, "t");
    head.version = 0;
    CHECK(code_of([&] { reg.swap_head("t", head, build_index(corpus, *base, head)); }) == ErrorCode::kConflict);
    head.version = 3;
    auto index = build_index(corpus, *base, head);
    auto stale = index;
    stale.head_version = 2;
    CHECK(code_of([&] { reg.swap_head("t", head, stale); }) == ErrorCode::kConflict);
    reg.swap_head("t", head, index);
    CHECK(reg.snapshot("t")->head.version == 3);
    CHECK(code_of([&] { reg.swap_head("t", head, index); }) == ErrorCode::kConflict);
  }

  TEST_CASE("replace_faqs rebuilds the index with the current head") {
    TenantRegistry reg(shared_base());
    reg.register_tenant("t", faqir::testing::toy_corpus());
    reg.replace_faqs("t", make_corpus("t", {{"brand new question", "fresh"}, {"another one", "fresh2"}}));
    const auto r = reg.handle_query("t", "brand new question");
    CHECK(r.intent == std::optional<std::string>("fresh"));
    CHECK(reg.snapshot("t")->index.size() == 2);
  }

  TEST_CASE("memory accounting for 384-d heads") {
    auto base = shared_base(384);
    TenantRegistry reg(base);
    CHECK(code_of([&] { reg.memory_report(); }) == ErrorCode::kInvalidArgument);
    for (int t = 0; t < 3; ++t) reg.register_tenant("t" + std::to_string(t), faqir::testing::toy_corpus());
    const auto m = reg.memory_report();
    // 384 x 384 weights + 384 bias, f32
    CHECK(m.head_bytes == 3 * 591360);
    CHECK(m.index_bytes == 3 * 9 * 384 * 4);
    CHECK(m.shared_bytes == base->parameter_bytes());
    CHECK(m.full_replication_bytes == m.shared_bytes + 591360);
    CHECK(m.per_tenant_bytes == (m.head_bytes + m.index_bytes + m.metadata_bytes) / 3);
    CHECK(m.saving_fraction == doctest::Approx(1.0 - double(m.per_tenant_bytes) / m.full_replication_bytes));
    CHECK(m.saving_fraction > 0.5);
    CHECK(BaseEncoder::live_instances() == 1);
    const auto j = to_json(m);
    CHECK(j["tenants"] == 3);
  }

  TEST_CASE("queries of one tenant are unaffected by training another") {
    TenantRegistry reg(shared_base());
    SyntheticSpec spec;
    spec.num_intents = 6;
    reg.register_tenant("a", make_synthetic_corpus(spec));
    reg.register_tenant("b", faqir::testing::toy_corpus());
    const auto reference = to_json(reg.handle_query("a", "where is my order"));
    std::atomic<bool> done{false};
    std::atomic<int> mismatches{0}, reads{0};
    std::thread reader([&] {
      while (!done) {
        if (to_json(reg.handle_query("a", "where is my order")) != reference) ++mismatches;
        ++reads;
      }
    });
    for (int i = 0; i < 3; ++i) reg.train_tenant("b", short_training());
    done = true;
    reader.join();
    CHECK(mismatches == 0);
    CHECK(reads > 0);
    CHECK(reg.snapshot("b")->head.version == 3);
  }
}
