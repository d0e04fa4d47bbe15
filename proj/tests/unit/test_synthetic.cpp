// SPDX-License-Identifier: Apache-2.0
#include <map>
#include <set>

#include "doctest.h"
#include "faqir/corpus.hpp"
#include "faqir/synthetic.hpp"

using namespace faqir;

namespace {

std::map<std::string, std::size_t> per_intent(const FaqCorpus& c) {
  std::map<std::string, std::size_t> out;
  for (const auto& e : c.train()) ++out[e.intent];
  return out;
}

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("generator honours the spec and is deterministic") {
    SyntheticSpec spec;
    spec.num_intents = 7;
    spec.train_per_intent = 4;
    spec.test_per_intent = 3;
    spec.oos_queries = 5;
    const auto a = make_synthetic_corpus(spec);
    const auto b = make_synthetic_corpus(spec);
    CHECK(a.size() == 28);
    CHECK(a.test().size() == 21);
    CHECK(a.oos_queries().size() == 5);
    for (const auto& [intent, n] : per_intent(a)) CHECK(n == 4);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.train()[i].text == b.train()[i].text);
    std::set<std::string> texts;
    for (const auto& e : a.train()) texts.insert(e.text);
    CHECK(texts.size() == a.size());
  }

  TEST_CASE("intent prefixes keep tenants apart") {
    SyntheticSpec spec;
    spec.tenant_id = "alpha";
    spec.num_intents = 3;
    const auto c = make_synthetic_corpus(spec);
    for (const auto& i : c.intents()) CHECK(i.rfind("alpha/", 0) == 0);
  }

  // Per-intent counts shaped like the published corpora: min 9, max 34,
  // median 12 and 328 questions over 21 intents for the mattress retailer.
  TEST_CASE("sized corpus reproduces a Table-7-shaped distribution") {
    const std::vector<std::size_t> counts = {9,  9,  10, 10, 10, 11, 11, 11, 12, 12, 12,
                                             12, 14, 15, 18, 20, 22, 24, 28, 34, 24};
    std::size_t total = 0;
    for (auto n : counts) total += n;
    REQUIRE(total == 328);
    const auto c = make_sized_corpus("sof", counts, 3);
    const auto s = stats(c);
    CHECK(s.num_intents == 21);
    CHECK(s.total_samples == 328);
    CHECK(s.min_per_intent == 9);
    CHECK(s.max_per_intent == 34);
    CHECK(s.median_per_intent == 12);
  }
}
