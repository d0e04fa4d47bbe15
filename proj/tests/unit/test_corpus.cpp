// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "faqir/corpus.hpp"
#include "faqir/error.hpp"
#include "fixtures.hpp"

using namespace faqir;
using faqir::testing::TempDir;
using faqir::testing::write_file;

TEST_SUITE("corpus") {
  TEST_CASE("HINT3 CSV: train dedup, OOS rows routed to OOS queries") {
    TempDir dir;
    write_file(dir / "train.csv",
               "sentence,label\n"
               "what is the price,PRICE\n"
               "what is the price,PRICE\n"
               "how much does it cost,PRICE\n"
               "is cod available,COD\n"
               "random chatter,NO_NODES_DETECTED\n");
    write_file(dir / "test.csv",
               "sentence,label\n"
               "price please,PRICE\n"
               "tell me a joke,NO_NODES_DETECTED\n");
    const auto c = load_corpus(CorpusPaths{dir / "train.csv", dir / "test.csv"}, CorpusFormat::kHint3Csv,
                               LoadOptions{"shop", std::nullopt});
    CHECK(c.tenant_id() == "shop");
    REQUIRE(c.size() == 3);
    CHECK(c.train()[2].text == "is cod available");
    CHECK(c.train()[2].id.value == 2);
    REQUIRE(c.test().size() == 1);
    REQUIRE(c.oos_queries().size() == 1);
    CHECK(c.oos_queries()[0] == "tell me a joke");
    CHECK(c.intents() == std::vector<std::string>{"COD", "PRICE"});
  }

  TEST_CASE("DialoGLUE CSV uses text/category") {
    TempDir dir;
    write_file(dir / "train.csv", "text,category\nmy card is lost,lost_card\nwhat rate,exchange_rate\n");
    const auto c = load_corpus(dir / "train.csv", CorpusFormat::kDialoglueCsv);
    CHECK(c.size() == 2);
    CHECK(c.train()[0].intent == "lost_card");
  }

  TEST_CASE("ingest errors name the file and line") {
    TempDir dir;
    CHECK_THROWS_WITH_AS(load_corpus(dir / "missing.csv", CorpusFormat::kHint3Csv),
                         doctest::Contains("missing.csv"), Error);
    write_file(dir / "bad.csv", "sentence,label\nfine,A\nonly one field\n");
    try {
      load_corpus(dir / "bad.csv", CorpusFormat::kHint3Csv);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find("bad.csv:3") != std::string::npos);
    }
    write_file(dir / "header.csv", "question,intent\nx,y\n");
    CHECK_THROWS_AS(load_corpus(dir / "header.csv", CorpusFormat::kHint3Csv), Error);
    write_file(dir / "empty.csv", "");
    CHECK_THROWS_AS(load_corpus(dir / "empty.csv", CorpusFormat::kHint3Csv), Error);
    write_file(dir / "only_oos.csv", "sentence,label\nhi,NO_NODES_DETECTED\n");
    CHECK_THROWS_AS(load_corpus(dir / "only_oos.csv", CorpusFormat::kHint3Csv), Error);
  }

  TEST_CASE("constructor rejects empty text and duplicate ids") {
    CHECK_THROWS_AS(FaqCorpus("t", {{QuestionId{0}, "  ", "a", std::nullopt}}, {}, {}), Error);
    CHECK_THROWS_AS(FaqCorpus("t", {{QuestionId{0}, "x", "", std::nullopt}}, {}, {}), Error);
    CHECK_THROWS_AS(FaqCorpus("t",
                              {{QuestionId{3}, "x", "a", std::nullopt}, {QuestionId{3}, "y", "a", std::nullopt}},
                              {}, {}),
                    Error);
  }

  TEST_CASE("position and intent ids") {
    const auto c = faqir::testing::toy_corpus();
    CHECK(c.position(QuestionId{4}) == 4);
    CHECK_THROWS_AS(c.position(QuestionId{99}), Error);
    const auto& ids = c.train_intent_ids();
    CHECK(c.intents()[ids[0]] == "account");
    CHECK(c.intent_index("refund").has_value());
    CHECK_FALSE(c.intent_index("nope").has_value());
  }

  TEST_CASE("stats use the lower median") {
    CHECK(lower_median({4, 1, 3, 2}) == 2);
    CHECK(lower_median({5}) == 5);
    CHECK(lower_median({3, 1, 2}) == 2);
    const auto s = stats(faqir::testing::toy_corpus());
    CHECK(s.num_intents == 3);
    CHECK(s.min_per_intent == 3);
    CHECK(s.max_per_intent == 3);
    CHECK(s.total_samples == 9);
  }

  TEST_CASE("few-shot subset keeps min(k, available) per intent in original order") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; i < 12; ++i) rows.emplace_back("big question " + std::to_string(i), "big");
    for (int i = 0; i < 3; ++i) rows.emplace_back("small question " + std::to_string(i), "small");
    const auto c = make_corpus("t", rows);
    const auto sub = fewshot_subset(c, 5, 11);
    CHECK(sub.size() == 8);
    std::map<std::string, int> per;
    for (const auto& e : sub.train()) ++per[e.intent];
    CHECK(per["big"] == 5);
    CHECK(per["small"] == 3);
    for (std::size_t i = 1; i < sub.size(); ++i) CHECK(sub.train()[i - 1].id < sub.train()[i].id);

    const auto again = fewshot_subset(c, 5, 11);
    for (std::size_t i = 0; i < sub.size(); ++i) CHECK(sub.train()[i].id == again.train()[i].id);
    const auto other = fewshot_subset(c, 5, 12);
    bool differs = false;
    for (std::size_t i = 0; i < sub.size(); ++i) differs |= sub.train()[i].id != other.train()[i].id;
    CHECK(differs);
    CHECK_THROWS_AS(fewshot_subset(c, 0, 1), Error);
  }

  TEST_CASE("JSON round trip") {
    auto j = to_json(faqir::testing::toy_corpus("acme"));
    j["faqs"][0]["answer"] = "visit settings";
    j["oos"] = {"what is the weather"};
    const auto c = corpus_from_json(j);
    CHECK(c.tenant_id() == "acme");
    CHECK(c.size() == 9);
    CHECK(c.train()[0].answer == std::optional<std::string>("visit settings"));
    CHECK(c.oos_queries().size() == 1);
    CHECK_THROWS_AS(corpus_from_json(nlohmann::json{{"faqs", nlohmann::json::array()}}), Error);
    CHECK_THROWS_AS(corpus_from_json(nlohmann::json{{"faqs", {{{"text", 1}}}}}), Error);
  }

  TEST_CASE("format names") {
    CHECK(parse_corpus_format("hint3-csv") == CorpusFormat::kHint3Csv);
    CHECK(parse_corpus_format("dialoglue-csv") == CorpusFormat::kDialoglueCsv);
    CHECK_FALSE(parse_corpus_format("tsv").has_value());
    CHECK(default_schema(CorpusFormat::kDialoglueCsv).oos_label == "oos");
  }
}
