// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "faqir/lexical.hpp"
#include "fixtures.hpp"

using namespace faqir;

namespace {

using Doc = std::vector<std::string>;

const std::vector<Doc> kDocs{{"reset", "my", "password"},
                             {"forgot", "my", "password", "password"},
                             {"track", "my", "order"},
                             {"refund", "please"}};

FaqCorpus docs_corpus() {
  return make_corpus("lex", {{"reset my password", "account"},
                             {"Forgot my PASSWORD, password!", "account"},
                             {"track my order", "shipping"},
                             {"refund please", "refund"}});
}

// Okapi BM25 written out directly from its textbook definition.
double bm25_oracle(const Doc& query, std::size_t d, double k1 = 1.5, double b = 0.75) {
  const double n = kDocs.size();
  double avg = 0;
  for (const auto& doc : kDocs) avg += doc.size();
  avg /= n;
  double score = 0;
  for (const auto& term : query) {
    double df = 0;
    for (const auto& doc : kDocs) df += std::count(doc.begin(), doc.end(), term) > 0;
    const double idf = std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
    const double tf = std::count(kDocs[d].begin(), kDocs[d].end(), term);
    score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * kDocs[d].size() / avg));
  }
  return score;
}

double tfidf_oracle(const Doc& query, std::size_t d) {
  const double n = kDocs.size();
  std::set<std::string> vocab;
  for (const auto& doc : kDocs) vocab.insert(doc.begin(), doc.end());
  auto vec = [&](const Doc& words) {
    std::map<std::string, double> v;
    for (const auto& w : words) {
      if (!vocab.count(w)) continue;
      double df = 0;
      for (const auto& doc : kDocs) df += std::count(doc.begin(), doc.end(), w) > 0;
      v[w] += std::log((1 + n) / (1 + df)) + 1;
    }
    return v;
  };
  const auto q = vec(query), x = vec(kDocs[d]);
  double dot = 0, nq = 0, nx = 0;
  for (auto& [w, val] : q) {
    nq += val * val;
    if (x.count(w)) dot += val * x.at(w);
  }
  for (auto& [w, val] : x) nx += val * val;
  return nq == 0 ? 0 : dot / std::sqrt(nq * nx);
}

}  // namespace

TEST_SUITE("lexical") {
  TEST_CASE("tokenizer") {
    CHECK(tokenize("Hello, World!! x2") == std::vector<std::string>{"hello", "world", "x2"});
    CHECK(tokenize("  ...  ").empty());
    CHECK(tokenize("caf\xC3\xA9-bar") == std::vector<std::string>{"caf\xC3\xA9", "bar"});
    CHECK(tokenize("don't") == std::vector<std::string>{"don", "t"});
  }

  TEST_CASE("index statistics") {
    const LexicalIndex index(docs_corpus());
    CHECK(index.documents() == 4);
    CHECK(index.document_frequency("my") == 3);
    CHECK(index.document_frequency("password") == 2);
    CHECK(index.document_frequency("missing") == 0);
  }

  TEST_CASE("bm25 matches the textbook formula") {
    const Bm25Ranker ranker(docs_corpus());
    for (const Doc& q : std::vector<Doc>{{"password"}, {"my", "password"}, {"track", "order", "order"},
                                         {"refund"}, {"nothing"}}) {
      std::string text;
      for (const auto& w : q) text += w + " ";
      const auto scores = ranker.question_scores(text);
      for (std::size_t d = 0; d < kDocs.size(); ++d) {
        CHECK(scores[d] == doctest::Approx(bm25_oracle(q, d)).epsilon(1e-12));
      }
    }
    // "my" appears in 3 of 4 documents: negative raw idf clamps to zero.
    CHECK(ranker.idf("my") == 0.0);
    CHECK(ranker.idf("refund") == doctest::Approx(std::log(3.5 / 1.5)));
  }

  TEST_CASE("tf-idf cosine matches a direct computation") {
    const TfidfRanker ranker(docs_corpus());
    for (const Doc& q : std::vector<Doc>{{"password"}, {"my", "password", "unknownword"},
                                         {"track", "order", "order"}, {"refund", "please"}}) {
      std::string text;
      for (const auto& w : q) text += w + " ";
      const auto scores = ranker.question_scores(text);
      for (std::size_t d = 0; d < kDocs.size(); ++d) {
        CHECK(scores[d] == doctest::Approx(tfidf_oracle(q, d)).epsilon(1e-12));
      }
    }
    CHECK(ranker.question_scores("refund please")[3] == doctest::Approx(1.0));
  }

  TEST_CASE("rankings aggregate per intent") {
    const auto corpus = docs_corpus();
    const auto r = bm25_rank(corpus, "forgot password", 3);
    REQUIRE_FALSE(r.intents.empty());
    CHECK(r.intents[0].intent == "account");
    CHECK(tfidf_rank(corpus, "track order", 1).intents.at(0).intent == "shipping");
    CHECK(tfidf_rank(corpus, "refund", 2).intents.size() == 2);
    CHECK(bm25_rank(corpus, "?!", 3).empty_query);
    CHECK(tfidf_rank(corpus, "", 3).empty_query);
    const auto unknown = tfidf_rank(corpus, "zebra", 3);
    CHECK_FALSE(unknown.empty_query);
    CHECK(unknown.intents.at(0).score == 0.0);
  }
}
