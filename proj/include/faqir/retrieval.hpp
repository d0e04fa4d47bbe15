// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/encoder.hpp"
#include "json.hpp"

namespace faqir {

struct RetrievalConfig {
  std::size_t k = 3;
  double threshold = 0.1;

  void validate() const;
};

nlohmann::json to_json(const RetrievalConfig& c);
RetrievalConfig retrieval_config_from_json(const nlohmann::json& j, RetrievalConfig defaults = {});

struct IndexEntry {
  QuestionId question_id;
  std::uint32_t intent = 0;  // index into TenantIndex::intents
};

// Cached, unit-norm embeddings of a tenant's train questions under one head
// version. Immutable once built.
struct TenantIndex {
  std::string tenant_id;
  std::uint64_t head_version = 0;
  std::size_t dimension = 0;
  std::vector<float> rows;  // size() x dimension, row-major
  std::vector<IndexEntry> entries;
  std::vector<std::string> intents;

  std::size_t size() const { return entries.size(); }
  std::span<const float> row(std::size_t i) const {
    return {rows.data() + i * dimension, dimension};
  }
  std::size_t bytes() const { return rows.size() * sizeof(float); }
  // Throws when shapes disagree or a row is not unit-norm.
  void validate() const;
};

struct IntentScore {
  std::string intent;
  double score = 0.0;
};

struct QuestionHit {
  QuestionId question_id;
  double score = 0.0;
};

struct RetrievalResult {
  std::vector<IntentScore> ranked_intents;
  std::vector<QuestionHit> top_question_hits;
  bool is_oos = false;
  std::vector<IntentScore> suggestions;  // filled only when is_oos
};

nlohmann::json to_json(const RetrievalResult& r);

// One row per train question: encode(base, head, text).
TenantIndex build_index(const FaqCorpus& corpus, const BaseEncoder& base, const TenantHead& head);

// Cosine search with max-per-intent aggregation. Throws kStaleIndex when
// the index was built by a different head version.
RetrievalResult query_topk(const TenantIndex& index, const BaseEncoder& base,
                           const TenantHead& head, std::string_view text,
                           const RetrievalConfig& config);

// Same search for an already encoded, unit-norm query.
RetrievalResult query_embedding(const TenantIndex& index, std::span<const float> query,
                                const RetrievalConfig& config);

// Max-aggregates per-question scores into a ranked intent list truncated to
// k (k = 0 keeps every intent). Ties go to the intent whose best question has
// the smaller id, then to the lexicographically smaller intent.
std::vector<IntentScore> aggregate_by_intent(std::span<const double> scores,
                                             std::span<const IndexEntry> entries,
                                             std::span<const std::string> intents, std::size_t k);

}  // namespace faqir
