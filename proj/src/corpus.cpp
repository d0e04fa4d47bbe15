// SPDX-License-Identifier: Apache-2.0
#include "faqir/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "faqir/csv.hpp"
#include "faqir/error.hpp"
#include "faqir/rng.hpp"

namespace faqir {

std::string trim(std::string_view text) {
  const auto is_space = [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

FaqCorpus::FaqCorpus(std::string tenant_id, std::vector<FaqEntry> train,
                     std::vector<LabeledQuery> test, std::vector<std::string> oos_queries)
    : tenant_id_(std::move(tenant_id)),
      train_(std::move(train)),
      test_(std::move(test)),
      oos_(std::move(oos_queries)) {
  std::set<std::string> intents;
  for (const auto& e : train_) {
    if (trim(e.text).empty()) {
      fail(ErrorCode::kInvalidArgument,
           "question " + std::to_string(e.id.value) + " has empty text");
    }
    if (trim(e.intent).empty()) {
      fail(ErrorCode::kInvalidArgument,
           "question " + std::to_string(e.id.value) + " has empty intent");
    }
    if (!positions_.emplace(e.id.value, positions_.size()).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate question id " + std::to_string(e.id.value));
    }
    intents.insert(e.intent);
  }
  for (const auto& q : test_) {
    if (trim(q.intent).empty()) fail(ErrorCode::kInvalidArgument, "test query with empty intent");
    intents.insert(q.intent);
  }
  intents_.assign(intents.begin(), intents.end());
  train_intent_ids_.reserve(train_.size());
  for (const auto& e : train_) train_intent_ids_.push_back(*intent_index(e.intent));
}

std::size_t FaqCorpus::position(QuestionId id) const {
  auto it = positions_.find(id.value);
  if (it == positions_.end()) {
    fail(ErrorCode::kNotFound, "unknown question id " + std::to_string(id.value));
  }
  return it->second;
}

std::optional<std::uint32_t> FaqCorpus::intent_index(std::string_view intent) const {
  auto it = std::lower_bound(intents_.begin(), intents_.end(), intent);
  if (it == intents_.end() || *it != intent) return std::nullopt;
  return static_cast<std::uint32_t>(it - intents_.begin());
}

FaqCorpus FaqCorpus::with_tenant_id(std::string tenant_id) const {
  FaqCorpus copy = *this;
  copy.tenant_id_ = std::move(tenant_id);
  return copy;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) {
  if (name == "hint3-csv" || name == "hint3") return CorpusFormat::kHint3Csv;
  if (name == "dialoglue-csv" || name == "dialoglue") return CorpusFormat::kDialoglueCsv;
  return std::nullopt;
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::kHint3Csv ? "hint3-csv" : "dialoglue-csv";
}

CsvSchema default_schema(CorpusFormat format) {
  if (format == CorpusFormat::kHint3Csv) return {"sentence", "label", std::nullopt, "NO_NODES_DETECTED"};
  return {"text", "category", std::nullopt, "oos"};
}

namespace {

struct Row {
  std::size_t line;
  std::string text;
  std::string label;
  std::optional<std::string> answer;
};

std::vector<Row> read_rows(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open corpus file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  std::vector<CsvRecord> records;
  try {
    records = parse_csv(content);
  } catch (const Error& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  if (records.empty()) fail(ErrorCode::kInvalidArgument, path.string() + ": empty corpus file");

  const auto& header = records.front().fields;
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto text_col = column(schema.text_column);
  const auto label_col = column(schema.label_column);
  if (!text_col || !label_col) {
    fail(ErrorCode::kParse, path.string() + ":1: header must contain columns '" +
                                schema.text_column + "' and '" + schema.label_column + "'");
  }
  std::optional<std::size_t> answer_col;
  if (schema.answer_column) answer_col = column(*schema.answer_column);

  std::vector<Row> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(rec.line) + ": expected " +
                                  std::to_string(header.size()) + " fields, found " +
                                  std::to_string(rec.fields.size()));
    }
    Row row{rec.line, trim(rec.fields[*text_col]), trim(rec.fields[*label_col]), std::nullopt};
    if (row.text.empty() || row.label.empty()) {
      fail(ErrorCode::kParse,
           path.string() + ":" + std::to_string(rec.line) + ": empty text or label");
    }
    if (answer_col) {
      std::string answer = trim(rec.fields[*answer_col]);
      if (!answer.empty()) row.answer = std::move(answer);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

FaqCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                      const LoadOptions& options) {
  return load_corpus(CorpusPaths{path, std::nullopt}, format, options);
}

FaqCorpus load_corpus(const CorpusPaths& paths, CorpusFormat format, const LoadOptions& options) {
  const CsvSchema schema = options.schema.value_or(default_schema(format));

  std::vector<FaqEntry> train;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& row : read_rows(paths.train, schema)) {
    if (row.label == schema.oos_label) continue;
    if (!seen.emplace(row.text, row.label).second) continue;
    train.push_back(FaqEntry{QuestionId{static_cast<std::uint32_t>(train.size())},
                             std::move(row.text), std::move(row.label), std::move(row.answer)});
  }
  if (train.empty()) {
    fail(ErrorCode::kInvalidArgument, paths.train.string() + ": corpus has no training rows");
  }

  std::vector<LabeledQuery> test;
  std::vector<std::string> oos;
  if (paths.test) {
    for (auto& row : read_rows(*paths.test, schema)) {
      if (row.label == schema.oos_label) {
        oos.push_back(std::move(row.text));
      } else {
        test.push_back(LabeledQuery{std::move(row.text), std::move(row.label)});
      }
    }
  }
  return FaqCorpus(options.tenant_id, std::move(train), std::move(test), std::move(oos));
}

FaqCorpus fewshot_subset(const FaqCorpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "fewshot_subset: k must be >= 1");
  std::vector<std::vector<std::size_t>> by_intent(corpus.intents().size());
  const auto& ids = corpus.train_intent_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) by_intent[ids[i]].push_back(i);

  std::vector<bool> keep(corpus.size(), false);
  for (std::size_t c = 0; c < by_intent.size(); ++c) {
    auto& rows = by_intent[c];
    if (rows.size() <= k) {
      for (std::size_t r : rows) keep[r] = true;
      continue;
    }
    // One stream per intent so the choice for an intent does not depend on
    // the sizes of the others.
    Rng rng = Rng::derive(seed, c);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + rng.uniform_index(rows.size() - i);
      std::swap(rows[i], rows[j]);
    }
    for (std::size_t i = 0; i < k; ++i) keep[rows[i]] = true;
  }

  std::vector<FaqEntry> train;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) train.push_back(corpus.train()[i]);
  }
  return FaqCorpus(corpus.tenant_id(), std::move(train), corpus.test(), corpus.oos_queries());
}

std::size_t lower_median(std::vector<std::size_t> values) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "median of empty list");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

CorpusStats stats(const FaqCorpus& corpus, std::size_t num_domains) {
  if (corpus.empty()) fail(ErrorCode::kInvalidArgument, "stats: empty corpus");
  std::map<std::uint32_t, std::size_t> counts;
  for (auto id : corpus.train_intent_ids()) ++counts[id];
  std::vector<std::size_t> per_intent;
  per_intent.reserve(counts.size());
  for (const auto& [id, n] : counts) per_intent.push_back(n);

  CorpusStats s;
  s.num_intents = per_intent.size();
  s.num_domains = num_domains;
  s.min_per_intent = *std::min_element(per_intent.begin(), per_intent.end());
  s.max_per_intent = *std::max_element(per_intent.begin(), per_intent.end());
  s.median_per_intent = lower_median(per_intent);
  s.total_samples = corpus.size();
  return s;
}

nlohmann::json to_json(const CorpusStats& s) {
  return {{"num_intents", s.num_intents},       {"num_domains", s.num_domains},
          {"min_per_intent", s.min_per_intent}, {"max_per_intent", s.max_per_intent},
          {"median_per_intent", s.median_per_intent}, {"total_samples", s.total_samples}};
}

nlohmann::json to_json(const FaqCorpus& corpus) {
  nlohmann::json faqs = nlohmann::json::array();
  for (const auto& e : corpus.train()) {
    nlohmann::json item = {{"id", e.id.value}, {"text", e.text}, {"intent", e.intent}};
    if (e.answer) item["answer"] = *e.answer;
    faqs.push_back(std::move(item));
  }
  nlohmann::json test = nlohmann::json::array();
  for (const auto& q : corpus.test()) test.push_back({{"text", q.text}, {"intent", q.intent}});
  return {{"tenant_id", corpus.tenant_id()}, {"faqs", faqs}, {"test", test},
          {"oos", corpus.oos_queries()}};
}

FaqCorpus corpus_from_json(const nlohmann::json& j, std::string tenant_id) {
  if (!j.is_object() || !j.contains("faqs") || !j["faqs"].is_array()) {
    fail(ErrorCode::kInvalidArgument, "corpus JSON must be an object with a 'faqs' array");
  }
  if (tenant_id.empty()) tenant_id = j.value("tenant_id", std::string("default"));
  std::vector<FaqEntry> train;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& item : j["faqs"]) {
    if (!item.is_object() || !item.contains("text") || !item.contains("intent") ||
        !item["text"].is_string() || !item["intent"].is_string()) {
      fail(ErrorCode::kInvalidArgument, "faq entries need string 'text' and 'intent'");
    }
    std::string text = trim(item["text"].get<std::string>());
    std::string intent = trim(item["intent"].get<std::string>());
    if (!seen.emplace(text, intent).second) continue;
    std::optional<std::string> answer;
    if (item.contains("answer") && item["answer"].is_string()) answer = item["answer"].get<std::string>();
    train.push_back(FaqEntry{QuestionId{static_cast<std::uint32_t>(train.size())}, std::move(text),
                             std::move(intent), std::move(answer)});
  }
  if (train.empty()) fail(ErrorCode::kInvalidArgument, "corpus has no faqs");
  std::vector<LabeledQuery> test;
  std::vector<std::string> oos;
  try {
    if (j.contains("test")) {
      for (const auto& item : j["test"]) {
        test.push_back({item.at("text").get<std::string>(), item.at("intent").get<std::string>()});
      }
    }
    if (j.contains("oos")) oos = j["oos"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kInvalidArgument, "'test' needs {text, intent} objects and 'oos' strings");
  }
  return FaqCorpus(std::move(tenant_id), std::move(train), std::move(test), std::move(oos));
}

FaqCorpus make_corpus(std::string tenant_id,
                      const std::vector<std::pair<std::string, std::string>>& rows) {
  std::vector<FaqEntry> train;
  train.reserve(rows.size());
  for (const auto& [text, intent] : rows) {
    train.push_back(FaqEntry{QuestionId{static_cast<std::uint32_t>(train.size())}, text, intent,
                             std::nullopt});
  }
  return FaqCorpus(std::move(tenant_id), std::move(train));
}

}  // namespace faqir
