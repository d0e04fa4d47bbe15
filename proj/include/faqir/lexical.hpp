// SPDX-License-Identifier: Apache-2.0
#pragma once

// Lexical baselines over a tenant's train questions: Okapi BM25 and cosine
// over smoothed-idf TF-IDF vectors, both ranked per intent by max question
// score.

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/retrieval.hpp"

namespace faqir {

// Lowercases ASCII letters and splits on every byte that is not an ASCII
// letter or digit. Bytes of multi-byte UTF-8 sequences count as word bytes.
std::vector<std::string> tokenize(std::string_view text);

struct LexicalRanking {
  std::vector<IntentScore> intents;
  bool empty_query = false;  // no tokens survived tokenization
};

class LexicalIndex {
 public:
  explicit LexicalIndex(const FaqCorpus& corpus);

  std::size_t documents() const { return doc_lengths_.size(); }
  std::size_t document_frequency(std::string_view term) const;

 protected:
  struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
  };

  const std::vector<Posting>* postings(const std::string& term) const;

  std::vector<std::size_t> doc_lengths_;
  std::vector<IndexEntry> entries_;
  std::vector<std::string> intents_;
  std::unordered_map<std::string, std::vector<Posting>> terms_;
};

class Bm25Ranker : public LexicalIndex {
 public:
  explicit Bm25Ranker(const FaqCorpus& corpus, double k1 = 1.5, double b = 0.75);

  // max(0, ln((N - df + 0.5) / (df + 0.5))).
  double idf(std::string_view term) const;
  // One score per train question; repeated query terms count repeatedly.
  std::vector<double> question_scores(std::string_view query) const;
  LexicalRanking rank(std::string_view query, std::size_t k) const;

 private:
  double k1_;
  double b_;
  double average_length_ = 0.0;
};

class TfidfRanker : public LexicalIndex {
 public:
  explicit TfidfRanker(const FaqCorpus& corpus);

  // ln((1 + N) / (1 + df)) + 1.
  double idf(std::string_view term) const;
  // Cosine between L2-normalized tf-idf vectors; out-of-vocabulary query
  // terms are dropped.
  std::vector<double> question_scores(std::string_view query) const;
  LexicalRanking rank(std::string_view query, std::size_t k) const;

 private:
  std::vector<double> doc_norms_;
};

LexicalRanking bm25_rank(const FaqCorpus& corpus, std::string_view query, std::size_t k);
LexicalRanking tfidf_rank(const FaqCorpus& corpus, std::string_view query, std::size_t k);

}  // namespace faqir
