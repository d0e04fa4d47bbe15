// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace faqir {

struct QuestionId {
  std::uint32_t value = 0;
  friend auto operator<=>(const QuestionId&, const QuestionId&) = default;
};

struct FaqEntry {
  QuestionId id;
  std::string text;
  std::string intent;
  std::optional<std::string> answer;  // text response or action tag
};

struct LabeledQuery {
  std::string text;
  std::string intent;
};

// One tenant's labeled FAQ set. Immutable once constructed; the constructor
// enforces the invariants (non-empty trimmed text and intent, unique ids,
// all intents registered).
class FaqCorpus {
 public:
  FaqCorpus() = default;
  FaqCorpus(std::string tenant_id, std::vector<FaqEntry> train,
            std::vector<LabeledQuery> test = {}, std::vector<std::string> oos_queries = {});

  const std::string& tenant_id() const { return tenant_id_; }
  const std::vector<FaqEntry>& train() const { return train_; }
  const std::vector<LabeledQuery>& test() const { return test_; }
  const std::vector<std::string>& oos_queries() const { return oos_; }
  // Sorted, unique.
  const std::vector<std::string>& intents() const { return intents_; }

  std::size_t size() const { return train_.size(); }
  bool empty() const { return train_.empty(); }

  // Position of a question in train(); throws kNotFound.
  std::size_t position(QuestionId id) const;
  const FaqEntry& entry(QuestionId id) const { return train_[position(id)]; }

  // Index into intents() for each train row.
  const std::vector<std::uint32_t>& train_intent_ids() const { return train_intent_ids_; }
  std::optional<std::uint32_t> intent_index(std::string_view intent) const;

  FaqCorpus with_tenant_id(std::string tenant_id) const;

 private:
  std::string tenant_id_;
  std::vector<FaqEntry> train_;
  std::vector<LabeledQuery> test_;
  std::vector<std::string> oos_;
  std::vector<std::string> intents_;
  std::vector<std::uint32_t> train_intent_ids_;
  std::unordered_map<std::uint32_t, std::size_t> positions_;
};

struct CorpusStats {
  std::size_t num_intents = 0;
  std::size_t num_domains = 1;  // metadata, not derivable from rows
  std::size_t min_per_intent = 0;
  std::size_t max_per_intent = 0;
  std::size_t median_per_intent = 0;  // lower median
  std::size_t total_samples = 0;
};

enum class CorpusFormat { kHint3Csv, kDialoglueCsv };

std::optional<CorpusFormat> parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

struct CsvSchema {
  std::string text_column;
  std::string label_column;
  std::optional<std::string> answer_column;
  // Label marking out-of-scope rows in test files.
  std::string oos_label;
};

// hint3-csv: (sentence, label), OOS label NO_NODES_DETECTED.
// dialoglue-csv: (text, category), OOS label "oos".
CsvSchema default_schema(CorpusFormat format);

struct LoadOptions {
  std::string tenant_id = "default";
  std::optional<CsvSchema> schema;
};

struct CorpusPaths {
  std::filesystem::path train;
  std::optional<std::filesystem::path> test;
};

// Loads a training file as a corpus. Duplicate (text, intent) rows are
// dropped keeping the first; train rows carrying the OOS label are skipped.
// Errors: missing file (kIo), malformed row with its line (kParse), empty
// corpus (kInvalidArgument).
FaqCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                      const LoadOptions& options = {});
// Train plus an optional test file; test rows with the OOS label become
// oos_queries, the rest in-scope test queries.
FaqCorpus load_corpus(const CorpusPaths& paths, CorpusFormat format,
                      const LoadOptions& options = {});

// Keeps min(k, available) questions per intent, chosen by a seeded draw and
// emitted in their original order. Test and OOS splits are carried over.
FaqCorpus fewshot_subset(const FaqCorpus& corpus, std::size_t k, std::uint64_t seed);

CorpusStats stats(const FaqCorpus& corpus, std::size_t num_domains = 1);

// Lower median of an unsorted list; throws on empty input.
std::size_t lower_median(std::vector<std::size_t> values);

std::string trim(std::string_view text);

nlohmann::json to_json(const CorpusStats& s);
nlohmann::json to_json(const FaqCorpus& corpus);
// Accepts {"tenant_id"?, "faqs":[{"text","intent","answer"?}], "test"?:[{"text","intent"}],
// "oos"?:[string]}. Question ids are assigned in order.
FaqCorpus corpus_from_json(const nlohmann::json& j, std::string tenant_id = {});

// Builds a corpus from (text, intent) rows assigning ids 0..n-1.
FaqCorpus make_corpus(std::string tenant_id,
                      const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace faqir
