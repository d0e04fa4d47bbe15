// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/encoder.hpp"
#include "faqir/losses.hpp"
#include "faqir/sampling.hpp"
#include "json.hpp"

namespace faqir {

enum class Objective { kContrastive, kTriplet, kOnlineTriplet };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view name);

struct TrainConfig {
  // Tuned for a linear head; 2e-5 is the setting for full transformer layers.
  double learning_rate = 2e-3;
  std::size_t batch_size = 16;
  std::size_t iterations = 10000;
  double warmup_fraction = 0.10;
  double max_grad_norm = 1.0;
  double contrastive_margin = 0.5;
  double triplet_margin = 0.15;
  double weight_decay = 0.01;
  std::uint64_t seed = 42;
  std::size_t log_every = 100;
  Objective objective = Objective::kContrastive;
  TripletMining mining = TripletMining::kBatchHard;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig defaults = {});

// ---------------------------------------------------------------------------
// Optimizer: AdamW with global-norm clipping and a linear warmup / linear
// decay schedule.

struct HeadGradients {
  std::vector<float> weight;
  std::vector<float> bias;

  static HeadGradients zeros_like(const TenantHead& head);
  void clear();
};

struct AdamWState {
  std::vector<float> m_weight, v_weight, m_bias, v_bias;

  static AdamWState zeros_like(const TenantHead& head);
};

struct StepInfo {
  double learning_rate = 0.0;
  double grad_norm = 0.0;  // before clipping
};

std::size_t warmup_steps(std::size_t total_steps, double warmup_fraction);
// base_lr * min(step / warmup, (total - step) / (total - warmup)), 0-based step.
double scheduled_lr(double base_lr, std::size_t step, std::size_t total_steps,
                    std::size_t warmup);

// Clips grads to max_grad_norm (in place), then applies one AdamW update
// to head (decoupled weight decay on W only). Throws kNumerical naming the
// offending tensor when a gradient is NaN or infinite; head and state are
// untouched in that case.
StepInfo optimizer_step(TenantHead& head, HeadGradients& grads, AdamWState& state,
                        std::size_t step_index, const TrainConfig& config);

// ---------------------------------------------------------------------------
// Training loops.

struct TrainReport {
  std::vector<double> loss_curve;  // mean batch loss per logging interval
  double initial_loss = 0.0;       // on a fixed evaluation sample
  double final_loss = 0.0;
  std::size_t iterations = 0;
  std::size_t log_every = 0;
  double wall_seconds = 0.0;
  std::uint64_t head_version = 0;
  TrainConfig config;
};

nlohmann::json to_json(const TrainReport& r);

struct TrainHooks {
  // Called with the batch gradients before clipping; tests use it to inject
  // faults.
  std::function<void(std::size_t step, HeadGradients&)> on_gradients;
};

struct TrainResult {
  TenantHead head;
  TrainReport report;
};

// Base embeddings of the rows referenced by a training set, computed once.
struct EmbeddedRows {
  std::size_t dimension = 0;
  std::vector<float> values;  // rows x dimension
  std::vector<std::uint32_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * dimension, dimension};
  }
};

struct RowPair {
  std::uint32_t a, b;
  std::uint8_t label;
};

struct RowTriplet {
  std::uint32_t anchor, positive, negative;
};

EmbeddedRows embed_rows(const FaqCorpus& corpus, const BaseEncoder& base);

// Core loop over cached rows. Pairs drive kContrastive and kOnlineTriplet,
// triplets drive kTriplet. The result's version is init.version + 1.
TrainResult train_rows(const EmbeddedRows& rows, std::span<const RowPair> pairs,
                       std::span<const RowTriplet> triplets, const TenantHead& init,
                       const TrainConfig& config, const TrainHooks& hooks = {});

// Head training over a corpus. With no init, starts from
// head_init(d, d, config.seed). Deterministic for a fixed seed.
TrainResult train_head(const FaqCorpus& corpus, const BaseEncoder& base,
                       std::span<const QuestionPair> pairs, const TrainConfig& config,
                       const TenantHead* init = nullptr, const TrainHooks& hooks = {});
TrainResult train_head(const FaqCorpus& corpus, const BaseEncoder& base,
                       std::span<const Triplet> triplets, const TrainConfig& config,
                       const TenantHead* init = nullptr, const TrainHooks& hooks = {});

// Sampling + training for one tenant: all pairs, weights from the model being
// fine-tuned (encode(base, init)), hard sampling, then the configured
// objective (kTriplet builds triplets from the weighted pairs).
TrainResult fine_tune(const FaqCorpus& corpus, const BaseEncoder& base, const TenantHead& init,
                      const TrainConfig& config, const SamplingConfig& sampling,
                      const TrainHooks& hooks = {});

struct PretrainOptions {
  std::size_t triplets_per_dataset = 100000;
  SamplingConfig sampling;
};

struct PretrainFinetuneResult {
  TenantHead shared_head;
  TenantHead tenant_head;
  TrainReport pretrain_report;
  TrainReport finetune_report;
};

// Task-adaptive pre-training of a shared head on offline in-domain triplets
// from every corpus (triplet objective), then contrastive fine-tuning of a
// copy on the tenant. The shared head starts from head_init(seed of
// config_ft), so zero pre-train iterations reduce to fine_tune alone.
PretrainFinetuneResult pretrain_then_finetune(std::span<const FaqCorpus> corpora,
                                              const FaqCorpus& tenant, const BaseEncoder& base,
                                              const TrainConfig& config_pt,
                                              const TrainConfig& config_ft,
                                              const PretrainOptions& options);

}  // namespace faqir
