// SPDX-License-Identifier: Apache-2.0
#include "faqir/training.hpp"

#include <chrono>
#include <cmath>

#include "faqir/error.hpp"
#include "faqir/simd/kernels.hpp"

namespace faqir {

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::kContrastive: return "contrastive";
    case Objective::kTriplet: return "triplet";
    case Objective::kOnlineTriplet: return "online-triplet";
  }
  return "unknown";
}

Objective parse_objective(std::string_view name) {
  if (name == "contrastive") return Objective::kContrastive;
  if (name == "triplet") return Objective::kTriplet;
  if (name == "online-triplet") return Objective::kOnlineTriplet;
  fail(ErrorCode::kInvalidArgument, "unknown objective '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* rule) {
    if (!ok) fail(ErrorCode::kInvalidArgument, std::string("train.") + field + " " + rule);
  };
  require(std::isfinite(learning_rate) && learning_rate >= 0.0, "learning_rate", "must be >= 0");
  require(batch_size > 0, "batch_size", "must be > 0");
  require(warmup_fraction >= 0.0 && warmup_fraction < 1.0, "warmup_fraction", "must be in [0, 1)");
  require(std::isfinite(max_grad_norm) && max_grad_norm > 0.0, "max_grad_norm", "must be > 0");
  require(std::isfinite(contrastive_margin) && contrastive_margin > 0.0, "contrastive_margin",
          "must be > 0");
  require(std::isfinite(triplet_margin) && triplet_margin > 0.0, "triplet_margin", "must be > 0");
  require(std::isfinite(weight_decay) && weight_decay >= 0.0, "weight_decay", "must be >= 0");
  require(log_every > 0, "log_every", "must be > 0");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"iterations", c.iterations},
          {"warmup_fraction", c.warmup_fraction},
          {"max_grad_norm", c.max_grad_norm},
          {"contrastive_margin", c.contrastive_margin},
          {"triplet_margin", c.triplet_margin},
          {"weight_decay", c.weight_decay},
          {"seed", c.seed},
          {"log_every", c.log_every},
          {"objective", std::string(to_string(c.objective))},
          {"mining", c.mining == TripletMining::kBatchHard ? "batch-hard" : "batch-all"}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "train config must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "iterations") c.iterations = value.get<std::size_t>();
      else if (key == "warmup_fraction") c.warmup_fraction = value.get<double>();
      else if (key == "max_grad_norm") c.max_grad_norm = value.get<double>();
      else if (key == "contrastive_margin") c.contrastive_margin = value.get<double>();
      else if (key == "triplet_margin") c.triplet_margin = value.get<double>();
      else if (key == "weight_decay") c.weight_decay = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "log_every") c.log_every = value.get<std::size_t>();
      else if (key == "objective") c.objective = parse_objective(value.get<std::string>());
      else if (key == "mining") {
        const auto m = value.get<std::string>();
        if (m == "batch-hard") c.mining = TripletMining::kBatchHard;
        else if (m == "batch-all") c.mining = TripletMining::kBatchAll;
        else fail(ErrorCode::kInvalidArgument, "train.mining: unknown value '" + m + "'");
      } else {
        fail(ErrorCode::kInvalidArgument, "train." + key + ": unknown field");
      }
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::kInvalidArgument, "train." + key + ": wrong type");
    }
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const TrainReport& r) {
  return {{"loss_curve", r.loss_curve},     {"initial_loss", r.initial_loss},
          {"final_loss", r.final_loss},     {"iterations", r.iterations},
          {"log_every", r.log_every},       {"wall_seconds", r.wall_seconds},
          {"head_version", r.head_version}, {"config", to_json(r.config)}};
}

EmbeddedRows embed_rows(const FaqCorpus& corpus, const BaseEncoder& base) {
  EmbeddedRows rows;
  rows.dimension = base.dimension();
  rows.values.reserve(corpus.size() * rows.dimension);
  for (const auto& e : corpus.train()) {
    auto v = base.embed(e.text);
    if (v.values.size() != rows.dimension) {
      fail(ErrorCode::kDimensionMismatch, "base encoder returned a vector of the wrong size");
    }
    rows.values.insert(rows.values.end(), v.values.begin(), v.values.end());
  }
  rows.labels = corpus.train_intent_ids();
  return rows;
}

namespace {

// Forward/backward through one head for a set of rows, accumulating the
// gradients of a loss expressed on the pre-normalization outputs.
class HeadPass {
 public:
  HeadPass(const TenantHead& head, const EmbeddedRows& rows) : head_(head), rows_(rows) {}

  std::vector<double> forward(std::uint32_t row) const {
    std::vector<float> z(head_.d_out);
    simd::active().gemv(head_.weight.data(), rows_.row(row).data(), head_.bias.data(), z.data(),
                        head_.d_out, head_.d_in);
    return {z.begin(), z.end()};
  }

  void backward(std::uint32_t row, const std::vector<double>& grad_z, float scale,
                HeadGradients& grads) const {
    std::vector<float> g(grad_z.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<float>(grad_z[i]);
    simd::active().rank1_update(grads.weight.data(), scale, g.data(), rows_.row(row).data(),
                                head_.d_out, head_.d_in);
    for (std::size_t i = 0; i < g.size(); ++i) grads.bias[i] += scale * g[i];
  }

 private:
  const TenantHead& head_;
  const EmbeddedRows& rows_;
};

// Items are pair or triplet indices; one batch is a list of item indices.
class BatchStream {
 public:
  BatchStream(std::size_t items, std::size_t batch, std::uint64_t seed)
      : order_(items), batch_(batch), rng_(Rng::derive(seed, 0xBA7C)) {
    for (std::size_t i = 0; i < items; ++i) order_[i] = i;
    reshuffle();
  }

  std::vector<std::size_t> next() {
    std::vector<std::size_t> out;
    out.reserve(batch_);
    while (out.size() < batch_) {
      if (cursor_ == order_.size()) reshuffle();
      out.push_back(order_[cursor_++]);
    }
    return out;
  }

 private:
  void reshuffle() {
    rng_.shuffle(std::span<std::size_t>(order_));
    cursor_ = 0;
  }

  std::vector<std::size_t> order_;
  std::size_t batch_;
  Rng rng_;
  std::size_t cursor_ = 0;
};

struct Problem {
  const EmbeddedRows& rows;
  std::span<const RowPair> pairs;
  std::span<const RowTriplet> triplets;
  const TrainConfig& config;

  std::size_t item_count() const {
    return config.objective == Objective::kTriplet ? triplets.size() : pairs.size();
  }
  std::size_t items_per_batch() const {
    if (config.objective == Objective::kOnlineTriplet) return std::max<std::size_t>(1, config.batch_size / 2);
    return config.batch_size;
  }

  // Mean loss over the batch; accumulates mean gradients when grads != null.
  double batch_loss(const TenantHead& head, std::span<const std::size_t> batch,
                    HeadGradients* grads) const {
    HeadPass pass(head, rows);
    const float scale = 1.0f / static_cast<float>(batch.size());
    double total = 0.0;
    switch (config.objective) {
      case Objective::kContrastive:
        for (std::size_t item : batch) {
          const RowPair& p = pairs[item];
          const auto za = pass.forward(p.a);
          const auto zb = pass.forward(p.b);
          const auto l = contrastive_loss(za, zb, p.label, config.contrastive_margin);
          total += l.loss;
          if (grads && l.loss > 0.0) {
            pass.backward(p.a, l.grad_a, scale, *grads);
            pass.backward(p.b, l.grad_b, scale, *grads);
          }
        }
        return total / static_cast<double>(batch.size());
      case Objective::kTriplet:
        for (std::size_t item : batch) {
          const RowTriplet& t = triplets[item];
          const auto za = pass.forward(t.anchor);
          const auto zp = pass.forward(t.positive);
          const auto zn = pass.forward(t.negative);
          const auto l = triplet_loss(za, zp, zn, config.triplet_margin);
          total += l.loss;
          if (grads && l.loss > 0.0) {
            pass.backward(t.anchor, l.grad_anchor, scale, *grads);
            pass.backward(t.positive, l.grad_positive, scale, *grads);
            pass.backward(t.negative, l.grad_negative, scale, *grads);
          }
        }
        return total / static_cast<double>(batch.size());
      case Objective::kOnlineTriplet: {
        std::vector<std::uint32_t> members;
        for (std::size_t item : batch) {
          members.push_back(pairs[item].a);
          members.push_back(pairs[item].b);
        }
        std::vector<std::vector<double>> z;
        std::vector<std::uint32_t> labels;
        for (auto r : members) {
          z.push_back(pass.forward(r));
          labels.push_back(rows.labels[r]);
        }
        const auto l = online_triplet_batch(z, labels, config.triplet_margin, config.mining);
        if (grads && l.loss > 0.0) {
          for (std::size_t i = 0; i < members.size(); ++i) pass.backward(members[i], l.grads[i], 1.0f, *grads);
        }
        return l.loss;
      }
    }
    return 0.0;
  }

  double evaluation_loss(const TenantHead& head) const {
    const std::size_t n = item_count();
    if (n == 0) return 0.0;
    std::vector<std::size_t> sample(std::min<std::size_t>(n, 1024));
    Rng rng = Rng::derive(config.seed, 0xE7A1);
    if (sample.size() == n) {
      for (std::size_t i = 0; i < n; ++i) sample[i] = i;
    } else {
      for (auto& s : sample) s = rng.uniform_index(n);
    }
    const std::size_t chunk = config.objective == Objective::kOnlineTriplet ? items_per_batch() : sample.size();
    double total = 0.0;
    std::size_t chunks = 0;
    for (std::size_t start = 0; start < sample.size(); start += chunk) {
      const std::size_t len = std::min(chunk, sample.size() - start);
      total += batch_loss(head, std::span<const std::size_t>(sample).subspan(start, len), nullptr);
      ++chunks;
    }
    return total / static_cast<double>(chunks);
  }
};

}  // namespace

TrainResult train_rows(const EmbeddedRows& rows, std::span<const RowPair> pairs,
                       std::span<const RowTriplet> triplets, const TenantHead& init,
                       const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  init.validate();
  if (rows.dimension != init.d_in) {
    fail(ErrorCode::kDimensionMismatch, "training rows have dimension " +
                                            std::to_string(rows.dimension) + ", head expects " +
                                            std::to_string(init.d_in));
  }
  const Problem problem{rows, pairs, triplets, config};
  if (problem.item_count() == 0) {
    fail(ErrorCode::kInvalidArgument, std::string("training set for objective ") +
                                          std::string(to_string(config.objective)) + " is empty");
  }
  for (const auto& p : pairs) {
    if (p.a >= rows.size() || p.b >= rows.size()) fail(ErrorCode::kInvalidArgument, "pair row out of range");
  }
  for (const auto& t : triplets) {
    if (t.anchor >= rows.size() || t.positive >= rows.size() || t.negative >= rows.size()) {
      fail(ErrorCode::kInvalidArgument, "triplet row out of range");
    }
  }

  const auto start = std::chrono::steady_clock::now();
  TrainResult result{init, {}};
  TenantHead& head = result.head;
  TrainReport& report = result.report;
  report.config = config;
  report.iterations = config.iterations;
  report.log_every = config.log_every;
  report.initial_loss = problem.evaluation_loss(head);

  AdamWState state = AdamWState::zeros_like(head);
  HeadGradients grads = HeadGradients::zeros_like(head);
  BatchStream stream(problem.item_count(), problem.items_per_batch(), config.seed);
  double interval_loss = 0.0;
  for (std::size_t step = 0; step < config.iterations; ++step) {
    grads.clear();
    const auto batch = stream.next();
    interval_loss += problem.batch_loss(head, batch, &grads);
    if (hooks.on_gradients) hooks.on_gradients(step, grads);
    optimizer_step(head, grads, state, step, config);
    if ((step + 1) % config.log_every == 0) {
      report.loss_curve.push_back(interval_loss / static_cast<double>(config.log_every));
      interval_loss = 0.0;
    }
  }
  head.validate();
  report.final_loss = problem.evaluation_loss(head);
  head.version = init.version + 1;
  report.head_version = head.version;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

TenantHead default_init(const FaqCorpus& corpus, const BaseEncoder& base, const TrainConfig& config,
                        const TenantHead* init) {
  if (init) return *init;
  return head_init(base.dimension(), base.dimension(), config.seed, 0.01f, corpus.tenant_id());
}

std::uint32_t row_of(const FaqCorpus& corpus, QuestionId id) {
  return static_cast<std::uint32_t>(corpus.position(id));
}

}  // namespace

TrainResult train_head(const FaqCorpus& corpus, const BaseEncoder& base,
                       std::span<const QuestionPair> pairs, const TrainConfig& config,
                       const TenantHead* init, const TrainHooks& hooks) {
  if (config.objective == Objective::kTriplet) {
    fail(ErrorCode::kInvalidArgument, "triplet objective needs triplets, got pairs");
  }
  const EmbeddedRows rows = embed_rows(corpus, base);
  std::vector<RowPair> row_pairs;
  row_pairs.reserve(pairs.size());
  for (const auto& p : pairs) row_pairs.push_back({row_of(corpus, p.a), row_of(corpus, p.b), p.label});
  return train_rows(rows, row_pairs, {}, default_init(corpus, base, config, init), config, hooks);
}

TrainResult train_head(const FaqCorpus& corpus, const BaseEncoder& base,
                       std::span<const Triplet> triplets, const TrainConfig& config,
                       const TenantHead* init, const TrainHooks& hooks) {
  if (config.objective != Objective::kTriplet) {
    fail(ErrorCode::kInvalidArgument, "pair objectives need pairs, got triplets");
  }
  const EmbeddedRows rows = embed_rows(corpus, base);
  std::vector<RowTriplet> row_triplets;
  row_triplets.reserve(triplets.size());
  for (const auto& t : triplets) {
    row_triplets.push_back(
        {row_of(corpus, t.anchor), row_of(corpus, t.positive), row_of(corpus, t.negative)});
  }
  return train_rows(rows, {}, row_triplets, default_init(corpus, base, config, init), config, hooks);
}

TrainResult fine_tune(const FaqCorpus& corpus, const BaseEncoder& base, const TenantHead& init,
                      const TrainConfig& config, const SamplingConfig& sampling,
                      const TrainHooks& hooks) {
  config.validate();
  sampling.validate();
  auto pairs = generate_all_pairs(corpus);
  const QuestionEmbeddings current = embed_questions(corpus, base, &init);
  compute_pair_weights(pairs, current, sampling.weight_floor);
  Rng rng(sampling.seed);
  const auto sampled = hard_sample(pairs, sampling, rng);
  if (config.objective == Objective::kTriplet) {
    const auto triplets = build_triplets(corpus, sampled, sampled.size(), rng);
    if (triplets.empty()) {
      fail(ErrorCode::kInvalidArgument, "no triplets could be formed for tenant " + corpus.tenant_id());
    }
    return train_head(corpus, base, std::span<const Triplet>(triplets), config, &init, hooks);
  }
  return train_head(corpus, base, std::span<const QuestionPair>(sampled), config, &init, hooks);
}

PretrainFinetuneResult pretrain_then_finetune(std::span<const FaqCorpus> corpora,
                                              const FaqCorpus& tenant, const BaseEncoder& base,
                                              const TrainConfig& config_pt,
                                              const TrainConfig& config_ft,
                                              const PretrainOptions& options) {
  TrainConfig pt = config_pt;
  pt.objective = Objective::kTriplet;
  pt.validate();
  config_ft.validate();

  const TenantHead shared_init =
      head_init(base.dimension(), base.dimension(), config_ft.seed, 0.01f, "shared");

  std::vector<QuestionEmbeddings> embeddings;
  embeddings.reserve(corpora.size());
  for (const auto& c : corpora) embeddings.push_back(embed_questions(c, base, &shared_init));
  const auto mixture =
      build_pretrain_mixture(corpora, embeddings, options.triplets_per_dataset, options.sampling);

  // Concatenate the cached base rows of every corpus.
  EmbeddedRows rows;
  rows.dimension = base.dimension();
  std::vector<std::uint32_t> offsets;
  std::uint32_t label_offset = 0;
  for (const auto& c : corpora) {
    offsets.push_back(static_cast<std::uint32_t>(rows.size()));
    const auto part = embed_rows(c, base);
    rows.values.insert(rows.values.end(), part.values.begin(), part.values.end());
    for (auto l : part.labels) rows.labels.push_back(l + label_offset);
    label_offset += static_cast<std::uint32_t>(c.intents().size());
  }
  std::vector<RowTriplet> triplets;
  triplets.reserve(mixture.size());
  for (const auto& t : mixture) {
    const auto& c = corpora[t.dataset];
    const auto off = offsets[t.dataset];
    triplets.push_back({off + row_of(c, t.triplet.anchor), off + row_of(c, t.triplet.positive),
                        off + row_of(c, t.triplet.negative)});
  }

  PretrainFinetuneResult out;
  if (triplets.empty()) {
    // Nothing to pre-train on (e.g. every intent is a singleton).
    out.shared_head = shared_init;
    out.pretrain_report.config = pt;
  } else {
    auto pre = train_rows(rows, {}, triplets, shared_init, pt);
    out.shared_head = std::move(pre.head);
    out.pretrain_report = std::move(pre.report);
  }

  TenantHead tenant_init = out.shared_head;
  tenant_init.tenant_id = tenant.tenant_id();
  auto ft = fine_tune(tenant, base, tenant_init, config_ft, options.sampling);
  out.tenant_head = std::move(ft.head);
  out.finetune_report = std::move(ft.report);
  return out;
}

}  // namespace faqir
