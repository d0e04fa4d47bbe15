// SPDX-License-Identifier: Apache-2.0
#include "faqir/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "faqir/error.hpp"
#include "faqir/simd/kernels.hpp"

namespace faqir {

void RetrievalConfig::validate() const {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "retrieval.k must be >= 1");
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "retrieval.threshold must be in [-1, 1]");
  }
}

nlohmann::json to_json(const RetrievalConfig& c) {
  return {{"k", c.k}, {"threshold", c.threshold}};
}

RetrievalConfig retrieval_config_from_json(const nlohmann::json& j, RetrievalConfig c) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "retrieval config must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "k") c.k = value.get<std::size_t>();
      else if (key == "threshold") c.threshold = value.get<double>();
      else fail(ErrorCode::kInvalidArgument, "retrieval." + key + ": unknown field");
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::kInvalidArgument, "retrieval." + key + ": wrong type");
    }
  }
  c.validate();
  return c;
}

void TenantIndex::validate() const {
  if (rows.size() != entries.size() * dimension) {
    fail(ErrorCode::kDimensionMismatch, "index rows do not match entries x dimension");
  }
  for (const auto& e : entries) {
    if (e.intent >= intents.size()) fail(ErrorCode::kInvalidArgument, "index entry intent out of range");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    const double n = l2_norm(row(i));
    if (!(std::abs(n - 1.0) < 1e-3)) {
      fail(ErrorCode::kNumerical, "index row " + std::to_string(i) + " is not unit-norm");
    }
  }
}

nlohmann::json to_json(const RetrievalResult& r) {
  auto list = [](const std::vector<IntentScore>& xs) {
    auto out = nlohmann::json::array();
    for (const auto& x : xs) out.push_back({{"intent", x.intent}, {"score", x.score}});
    return out;
  };
  return {{"intents", list(r.ranked_intents)}, {"oos", r.is_oos}, {"suggestions", list(r.suggestions)}};
}

TenantIndex build_index(const FaqCorpus& corpus, const BaseEncoder& base, const TenantHead& head) {
  if (corpus.empty()) fail(ErrorCode::kInvalidArgument, "cannot index an empty corpus");
  if (head.d_in != base.dimension()) {
    fail(ErrorCode::kDimensionMismatch, "head d_in " + std::to_string(head.d_in) +
                                            " does not match base dimension " +
                                            std::to_string(base.dimension()));
  }
  TenantIndex index;
  index.tenant_id = corpus.tenant_id();
  index.head_version = head.version;
  index.dimension = head.d_out;
  index.intents = corpus.intents();
  index.rows.reserve(corpus.size() * head.d_out);
  const auto& labels = corpus.train_intent_ids();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& e = corpus.train()[i];
    try {
      const auto v = encode(base, head, e.text);
      index.rows.insert(index.rows.end(), v.values.begin(), v.values.end());
    } catch (const Error& err) {
      fail(err.code(), "encoding question " + std::to_string(e.id.value) + ": " + err.what());
    }
    index.entries.push_back({e.id, labels[i]});
  }
  return index;
}

std::vector<IntentScore> aggregate_by_intent(std::span<const double> scores,
                                             std::span<const IndexEntry> entries,
                                             std::span<const std::string> intents, std::size_t k) {
  struct Best {
    double score = -std::numeric_limits<double>::infinity();
    std::uint32_t question = std::numeric_limits<std::uint32_t>::max();
    bool seen = false;
  };
  std::vector<Best> best(intents.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Best& b = best[entries[i].intent];
    const auto q = entries[i].question_id.value;
    if (!b.seen || scores[i] > b.score || (scores[i] == b.score && q < b.question)) {
      b = {scores[i], q, true};
    }
  }
  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < best.size(); ++i) {
    if (best[i].seen) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    if (best[x].score != best[y].score) return best[x].score > best[y].score;
    if (best[x].question != best[y].question) return best[x].question < best[y].question;
    return intents[x] < intents[y];
  });
  if (k > 0 && order.size() > k) order.resize(k);
  std::vector<IntentScore> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back({intents[i], best[i].score});
  return out;
}

RetrievalResult query_embedding(const TenantIndex& index, std::span<const float> query,
                                const RetrievalConfig& config) {
  config.validate();
  if (query.size() != index.dimension) {
    fail(ErrorCode::kDimensionMismatch, "query has dimension " + std::to_string(query.size()) +
                                            ", index has " + std::to_string(index.dimension));
  }
  const std::size_t n = index.size();
  std::vector<float> raw(n);
  if (n > 0) simd::active().dot_rows(index.rows.data(), query.data(), raw.data(), n, index.dimension);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = std::clamp(static_cast<double>(raw[i]), -1.0, 1.0);

  RetrievalResult result;
  result.ranked_intents = aggregate_by_intent(scores, index.entries, index.intents, config.k);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const std::size_t hits = std::min(config.k, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hits), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return index.entries[a].question_id < index.entries[b].question_id;
                    });
  for (std::size_t i = 0; i < hits; ++i) {
    result.top_question_hits.push_back({index.entries[order[i]].question_id, scores[order[i]]});
  }

  const double top = result.ranked_intents.empty() ? -1.0 : result.ranked_intents.front().score;
  result.is_oos = result.ranked_intents.empty() || top < config.threshold;
  if (result.is_oos) result.suggestions = result.ranked_intents;
  return result;
}

RetrievalResult query_topk(const TenantIndex& index, const BaseEncoder& base,
                           const TenantHead& head, std::string_view text,
                           const RetrievalConfig& config) {
  if (index.head_version != head.version || index.dimension != head.d_out) {
    fail(ErrorCode::kStaleIndex, "index for tenant '" + index.tenant_id + "' was built by head v" +
                                     std::to_string(index.head_version) + ", head is v" +
                                     std::to_string(head.version));
  }
  const auto q = encode(base, head, text);
  return query_embedding(index, q.values, config);
}

}  // namespace faqir
