// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/encoder.hpp"
#include "faqir/retrieval.hpp"
#include "faqir/training.hpp"
#include "json.hpp"

namespace faqir {

// Everything a query needs for one tenant. Published as a unit, so a reader
// always sees a head together with the index it built.
struct TenantState {
  TenantHead head;
  TenantIndex index;
  RetrievalConfig config;
  std::shared_ptr<const FaqCorpus> corpus;
};

struct QueryResponse {
  std::string tenant_id;
  std::optional<std::string> intent;  // absent when out-of-scope
  std::optional<std::string> answer;
  double score = 0.0;
  bool is_oos = false;
  std::vector<IntentScore> ranked_intents;
  std::vector<IntentScore> suggestions;
  std::vector<QuestionHit> question_hits;
  std::uint64_t head_version = 0;
};

nlohmann::json to_json(const QueryResponse& r);

struct MemoryReport {
  std::size_t tenants = 0;
  std::size_t shared_bytes = 0;
  // Totals over all tenants.
  std::size_t head_bytes = 0;
  std::size_t index_bytes = 0;
  std::size_t metadata_bytes = 0;
  // Mean per tenant: head + index + metadata.
  std::size_t per_tenant_bytes = 0;
  // shared + head: the cost of one full model copy per tenant.
  std::size_t full_replication_bytes = 0;
  double saving_fraction = 0.0;
  std::size_t resident_bytes = 0;  // process RSS when sampled, 0 if unknown
};

nlohmann::json to_json(const MemoryReport& r);

// Resident set size of this process from /proc/self/statm; 0 elsewhere.
std::size_t resident_bytes();

// Serving-side tenant table over one shared base encoder. Reads are lock-free
// with respect to writers of other tenants and never block on training.
class TenantRegistry {
 public:
  explicit TenantRegistry(std::shared_ptr<const BaseEncoder> base, RetrievalConfig defaults = {});

  const BaseEncoder& base() const { return *base_; }
  const RetrievalConfig& default_config() const { return defaults_; }

  // Zero-shot registration: near-identity head, index built immediately.
  // Throws kConflict for a duplicate id.
  void register_tenant(const std::string& tenant_id, FaqCorpus corpus,
                       std::optional<RetrievalConfig> config = std::nullopt,
                       std::optional<TenantHead> head = std::nullopt);
  // Rebuilds the index for new FAQs with the tenant's current head.
  void replace_faqs(const std::string& tenant_id, FaqCorpus corpus);
  void set_config(const std::string& tenant_id, RetrievalConfig config);

  // Fine-tunes from the current head and installs head and index together.
  // On failure the previous state keeps serving.
  TrainReport train_tenant(const std::string& tenant_id, const TrainConfig& config,
                           const SamplingConfig& sampling = {}, const TrainHooks& hooks = {});

  // Installs an externally trained pair. The versions must agree and exceed
  // the current head version (kConflict otherwise).
  void swap_head(const std::string& tenant_id, TenantHead head, TenantIndex index);

  QueryResponse handle_query(const std::string& tenant_id, std::string_view text) const;

  // Throws kNotFound for an unknown tenant.
  std::shared_ptr<const TenantState> snapshot(const std::string& tenant_id) const;
  std::vector<std::string> tenant_ids() const;
  std::size_t size() const;
  // Bumped on every registration or publication.
  std::uint64_t version() const;

  // Throws kInvalidArgument with no tenants registered.
  MemoryReport memory_report() const;

 private:
  struct Slot {
    mutable std::mutex state_mutex;  // guards the pointer copy only
    std::shared_ptr<const TenantState> state;
    std::mutex writer;  // serializes writers of this tenant
  };

  Slot& slot(const std::string& tenant_id) const;
  void publish(Slot& slot, std::shared_ptr<const TenantState> state);

  std::shared_ptr<const BaseEncoder> base_;
  RetrievalConfig defaults_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Slot>, std::less<>> slots_;
  std::atomic<std::uint64_t> version_{0};
};

}  // namespace faqir
