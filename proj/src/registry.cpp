// SPDX-License-Identifier: Apache-2.0
#include "faqir/registry.hpp"

#include <fstream>
#include <unistd.h>

#include "faqir/error.hpp"

namespace faqir {

namespace {

nlohmann::json scores_json(const std::vector<IntentScore>& xs) {
  auto out = nlohmann::json::array();
  for (const auto& x : xs) out.push_back({{"intent", x.intent}, {"score", x.score}});
  return out;
}

std::size_t metadata_bytes(const TenantState& s) {
  std::size_t bytes = sizeof(TenantState) + s.head.tenant_id.size() + s.index.tenant_id.size() +
                      s.index.entries.size() * sizeof(IndexEntry);
  for (const auto& i : s.index.intents) bytes += sizeof(std::string) + i.size();
  for (const auto& e : s.corpus->train()) {
    bytes += sizeof(FaqEntry) + e.text.size() + e.intent.size() + (e.answer ? e.answer->size() : 0);
  }
  return bytes;
}

}  // namespace

nlohmann::json to_json(const QueryResponse& r) {
  auto hits = nlohmann::json::array();
  for (const auto& h : r.question_hits) hits.push_back({{"question_id", h.question_id.value}, {"score", h.score}});
  return {{"tenant_id", r.tenant_id},
          {"intent", r.intent ? nlohmann::json(*r.intent) : nlohmann::json(nullptr)},
          {"answer", r.answer ? nlohmann::json(*r.answer) : nlohmann::json(nullptr)},
          {"score", r.score},
          {"is_oos", r.is_oos},
          {"intents", scores_json(r.ranked_intents)},
          {"suggestions", scores_json(r.suggestions)},
          {"questions", hits},
          {"head_version", r.head_version}};
}

nlohmann::json to_json(const MemoryReport& r) {
  return {{"tenants", r.tenants},
          {"shared_bytes", r.shared_bytes},
          {"head_bytes", r.head_bytes},
          {"index_bytes", r.index_bytes},
          {"metadata_bytes", r.metadata_bytes},
          {"per_tenant_bytes", r.per_tenant_bytes},
          {"full_replication_bytes", r.full_replication_bytes},
          {"saving_fraction", r.saving_fraction},
          {"resident_bytes", r.resident_bytes}};
}

std::size_t resident_bytes() {
  std::ifstream in("/proc/self/statm");
  std::size_t size = 0, resident = 0;
  if (!(in >> size >> resident)) return 0;
  return resident * static_cast<std::size_t>(sysconf(_SC_PAGESIZE));
}

TenantRegistry::TenantRegistry(std::shared_ptr<const BaseEncoder> base, RetrievalConfig defaults)
    : base_(std::move(base)), defaults_(defaults) {
  if (!base_) fail(ErrorCode::kInvalidArgument, "registry needs a base encoder");
  defaults_.validate();
}

TenantRegistry::Slot& TenantRegistry::slot(const std::string& tenant_id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = slots_.find(tenant_id);
  if (it == slots_.end()) fail(ErrorCode::kNotFound, "unknown tenant '" + tenant_id + "'");
  return *it->second;
}

void TenantRegistry::publish(Slot& s, std::shared_ptr<const TenantState> state) {
  std::shared_ptr<const TenantState> old;
  {
    std::lock_guard lock(s.state_mutex);
    old = std::exchange(s.state, std::move(state));
  }
  version_.fetch_add(1, std::memory_order_relaxed);
  // old is released here, outside the lock.
}

std::shared_ptr<const TenantState> TenantRegistry::snapshot(const std::string& tenant_id) const {
  Slot& s = slot(tenant_id);
  std::lock_guard lock(s.state_mutex);
  return s.state;
}

void TenantRegistry::register_tenant(const std::string& tenant_id, FaqCorpus corpus,
                                     std::optional<RetrievalConfig> config,
                                     std::optional<TenantHead> head) {
  if (tenant_id.empty()) fail(ErrorCode::kInvalidArgument, "tenant id must not be empty");
  {
    std::shared_lock lock(map_mutex_);
    if (slots_.contains(tenant_id)) fail(ErrorCode::kConflict, "tenant '" + tenant_id + "' already exists");
  }
  if (corpus.tenant_id() != tenant_id) corpus = corpus.with_tenant_id(tenant_id);
  auto state = std::make_shared<TenantState>();
  state->config = config.value_or(defaults_);
  state->config.validate();
  if (head) {
    head->validate();
    state->head = std::move(*head);
    state->head.tenant_id = tenant_id;
  } else {
    state->head = head_init(base_->dimension(), base_->dimension(), 0, 0.01f, tenant_id);
  }
  auto shared_corpus = std::make_shared<const FaqCorpus>(std::move(corpus));
  state->index = build_index(*shared_corpus, *base_, state->head);
  state->corpus = std::move(shared_corpus);

  auto fresh = std::make_unique<Slot>();
  fresh->state = std::move(state);
  std::unique_lock lock(map_mutex_);
  if (!slots_.emplace(tenant_id, std::move(fresh)).second) {
    fail(ErrorCode::kConflict, "tenant '" + tenant_id + "' already exists");
  }
  version_.fetch_add(1, std::memory_order_relaxed);
}

void TenantRegistry::replace_faqs(const std::string& tenant_id, FaqCorpus corpus) {
  Slot& s = slot(tenant_id);
  std::lock_guard writer(s.writer);
  const auto current = snapshot(tenant_id);
  if (corpus.tenant_id() != tenant_id) corpus = corpus.with_tenant_id(tenant_id);
  auto next = std::make_shared<TenantState>(*current);
  auto shared_corpus = std::make_shared<const FaqCorpus>(std::move(corpus));
  next->index = build_index(*shared_corpus, *base_, next->head);
  next->corpus = std::move(shared_corpus);
  publish(s, std::move(next));
}

void TenantRegistry::set_config(const std::string& tenant_id, RetrievalConfig config) {
  config.validate();
  Slot& s = slot(tenant_id);
  std::lock_guard writer(s.writer);
  auto next = std::make_shared<TenantState>(*snapshot(tenant_id));
  next->config = config;
  publish(s, std::move(next));
}

TrainReport TenantRegistry::train_tenant(const std::string& tenant_id, const TrainConfig& config,
                                         const SamplingConfig& sampling, const TrainHooks& hooks) {
  Slot& s = slot(tenant_id);
  std::lock_guard writer(s.writer);
  const auto current = snapshot(tenant_id);
  auto result = fine_tune(*current->corpus, *base_, current->head, config, sampling, hooks);
  auto next = std::make_shared<TenantState>();
  next->head = std::move(result.head);
  next->index = build_index(*current->corpus, *base_, next->head);
  next->config = current->config;
  next->corpus = current->corpus;
  publish(s, std::move(next));
  return result.report;
}

void TenantRegistry::swap_head(const std::string& tenant_id, TenantHead head, TenantIndex index) {
  if (head.version != index.head_version) {
    fail(ErrorCode::kConflict, "head v" + std::to_string(head.version) + " does not match index v" +
                                   std::to_string(index.head_version));
  }
  head.validate();
  index.validate();
  if (head.d_in != base_->dimension() || index.dimension != head.d_out) {
    fail(ErrorCode::kDimensionMismatch, "head or index shape does not fit the base encoder");
  }
  if (index.tenant_id != tenant_id) {
    fail(ErrorCode::kConflict, "index belongs to tenant '" + index.tenant_id + "'");
  }
  Slot& s = slot(tenant_id);
  std::lock_guard writer(s.writer);
  const auto current = snapshot(tenant_id);
  if (head.version <= current->head.version) {
    fail(ErrorCode::kConflict, "head v" + std::to_string(head.version) +
                                   " is not newer than installed v" +
                                   std::to_string(current->head.version));
  }
  if (index.size() != current->corpus->size()) {
    fail(ErrorCode::kConflict, "index has " + std::to_string(index.size()) + " rows, corpus has " +
                                   std::to_string(current->corpus->size()));
  }
  auto next = std::make_shared<TenantState>();
  head.tenant_id = tenant_id;
  next->head = std::move(head);
  next->index = std::move(index);
  next->config = current->config;
  next->corpus = current->corpus;
  publish(s, std::move(next));
}

QueryResponse TenantRegistry::handle_query(const std::string& tenant_id, std::string_view text) const {
  const auto state = snapshot(tenant_id);
  const auto result = query_topk(state->index, *base_, state->head, text, state->config);
  QueryResponse r;
  r.tenant_id = tenant_id;
  r.head_version = state->head.version;
  r.is_oos = result.is_oos;
  r.ranked_intents = result.ranked_intents;
  r.suggestions = result.suggestions;
  r.question_hits = result.top_question_hits;
  if (!result.ranked_intents.empty()) r.score = result.ranked_intents.front().score;
  if (!r.is_oos) {
    r.intent = result.ranked_intents.front().intent;
    if (!result.top_question_hits.empty()) {
      r.answer = state->corpus->entry(result.top_question_hits.front().question_id).answer;
    }
  }
  return r;
}

std::vector<std::string> TenantRegistry::tenant_ids() const {
  std::shared_lock lock(map_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : slots_) out.push_back(id);
  return out;
}

std::size_t TenantRegistry::size() const {
  std::shared_lock lock(map_mutex_);
  return slots_.size();
}

std::uint64_t TenantRegistry::version() const { return version_.load(std::memory_order_relaxed); }

MemoryReport TenantRegistry::memory_report() const {
  std::vector<std::shared_ptr<const TenantState>> states;
  {
    std::shared_lock lock(map_mutex_);
    for (const auto& [_, s] : slots_) {
      std::lock_guard state_lock(s->state_mutex);
      states.push_back(s->state);
    }
  }
  if (states.empty()) fail(ErrorCode::kInvalidArgument, "memory report needs at least one tenant");
  MemoryReport r;
  r.tenants = states.size();
  r.shared_bytes = base_->parameter_bytes();
  for (const auto& s : states) {
    r.head_bytes += s->head.bytes();
    r.index_bytes += s->index.bytes();
    r.metadata_bytes += metadata_bytes(*s);
  }
  r.per_tenant_bytes = (r.head_bytes + r.index_bytes + r.metadata_bytes) / r.tenants;
  r.full_replication_bytes = r.shared_bytes + r.head_bytes / r.tenants;
  r.saving_fraction = r.full_replication_bytes == 0
                          ? 0.0
                          : std::max(0.0, 1.0 - static_cast<double>(r.per_tenant_bytes) /
                                                    static_cast<double>(r.full_replication_bytes));
  r.resident_bytes = resident_bytes();
  return r;
}

}  // namespace faqir
