// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "faqir/error.hpp"
#include "faqir/hash_featurizer.hpp"
#include "faqir/sampling.hpp"
#include "faqir/synthetic.hpp"
#include "faqir/training.hpp"
#include "fixtures.hpp"

using namespace faqir;

namespace {

std::vector<RowPair> all_row_pairs(const EmbeddedRows& rows) {
  std::vector<RowPair> out;
  for (std::uint32_t i = 0; i < rows.size(); ++i)
    for (std::uint32_t j = i + 1; j < rows.size(); ++j)
      out.push_back({i, j, static_cast<std::uint8_t>(rows.labels[i] == rows.labels[j])});
  return out;
}

std::vector<RowTriplet> all_row_triplets(const EmbeddedRows& rows) {
  std::vector<RowTriplet> out;
  for (std::uint32_t a = 0; a < rows.size(); ++a)
    for (std::uint32_t p = 0; p < rows.size(); ++p)
      for (std::uint32_t n = 0; n < rows.size(); ++n)
        if (p != a && rows.labels[p] == rows.labels[a] && rows.labels[n] != rows.labels[a])
          out.push_back({a, p, n});
  return out;
}

TrainConfig quick_config(Objective objective) {
  TrainConfig c;
  c.objective = objective;
  c.iterations = 200;
  c.log_every = 20;
  c.learning_rate = 5e-3;
  c.seed = 5;
  return c;
}

// Gradient from the first step's hook against central differences of the
// full-set loss, which equals the batch loss when one batch covers the set.
void check_gradients(const EmbeddedRows& rows, std::span<const RowPair> pairs,
                     std::span<const RowTriplet> triplets, TrainConfig config) {
  const auto init = head_init(rows.dimension, rows.dimension, 3, 0.2f);
  HeadGradients captured;
  config.iterations = 1;
  TrainHooks hooks;
  hooks.on_gradients = [&](std::size_t, HeadGradients& g) { captured = g; };
  train_rows(rows, pairs, triplets, init, config, hooks);

  config.iterations = 0;
  auto loss_at = [&](const TenantHead& h) {
    return train_rows(rows, pairs, triplets, h, config).report.initial_loss;
  };
  const float h = 1e-3f;
  Rng rng(99);
  double dot = 0, na = 0, nn = 0;
  for (int trial = 0; trial < 48; ++trial) {
    const bool bias = trial % 4 == 0;
    const std::size_t i = rng.uniform_index(bias ? init.bias.size() : init.weight.size());
    auto up = init, down = init;
    (bias ? up.bias : up.weight)[i] += h;
    (bias ? down.bias : down.weight)[i] -= h;
    const double numeric = (loss_at(up) - loss_at(down)) / (2.0 * h);
    const double analytic = (bias ? captured.bias : captured.weight)[i];
    dot += numeric * analytic;
    na += analytic * analytic;
    nn += numeric * numeric;
    CHECK(std::abs(numeric - analytic) < 2e-3 + 2e-2 * std::abs(numeric));
  }
  CHECK(dot / std::sqrt(na * nn) > 0.999);
}

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("config json round trip and validation") {
    TrainConfig c;
    c.objective = Objective::kOnlineTriplet;
    c.mining = TripletMining::kBatchAll;
    c.iterations = 77;
    const auto back = train_config_from_json(to_json(c));
    CHECK(back.iterations == 77);
    CHECK(back.objective == Objective::kOnlineTriplet);
    CHECK(back.mining == TripletMining::kBatchAll);
    CHECK(train_config_from_json({{"learning_rate", 0.5}}).learning_rate == 0.5);
    CHECK_THROWS_WITH_AS(train_config_from_json({{"batch_size", 0}}), doctest::Contains("train.batch_size"), Error);
    CHECK_THROWS_WITH_AS(train_config_from_json({{"bogus", 1}}), doctest::Contains("train.bogus"), Error);
    CHECK_THROWS_AS(train_config_from_json({{"objective", "magic"}}), Error);
    CHECK(parse_objective("triplet") == Objective::kTriplet);
  }

  TEST_CASE("analytic head gradients: contrastive") {
    auto base = hash_featurizer(12, 4);
    const auto rows = embed_rows(faqir::testing::toy_corpus(), *base);
    const auto pairs = all_row_pairs(rows);
    auto config = quick_config(Objective::kContrastive);
    config.batch_size = pairs.size();
    config.contrastive_margin = 1.2;  // keep negatives active
    check_gradients(rows, pairs, {}, config);
  }

  TEST_CASE("analytic head gradients: triplet") {
    auto base = hash_featurizer(12, 4);
    const auto rows = embed_rows(faqir::testing::toy_corpus(), *base);
    const auto triplets = all_row_triplets(rows);
    auto config = quick_config(Objective::kTriplet);
    config.batch_size = triplets.size();
    config.triplet_margin = 1.0;
    check_gradients(rows, {}, triplets, config);
  }

  TEST_CASE("analytic head gradients: online batch-all") {
    auto base = hash_featurizer(12, 4);
    const auto rows = embed_rows(faqir::testing::toy_corpus(), *base);
    auto pairs = all_row_pairs(rows);
    pairs.resize(8);
    auto config = quick_config(Objective::kOnlineTriplet);
    config.mining = TripletMining::kBatchAll;
    config.batch_size = 16;
    config.triplet_margin = 1.0;
    check_gradients(rows, pairs, {}, config);
  }

  TEST_CASE("loss decreases for every objective") {
    auto base = hash_featurizer(24, 4);
    const auto corpus = faqir::testing::toy_corpus();
    const auto rows = embed_rows(corpus, *base);
    const auto pairs = all_row_pairs(rows);
    const auto triplets = all_row_triplets(rows);
    const auto init = head_init(24, 24, 1);
    for (auto objective : {Objective::kContrastive, Objective::kTriplet, Objective::kOnlineTriplet}) {
      CAPTURE(to_string(objective));
      const auto config = quick_config(objective);
      const auto r = train_rows(rows, pairs, triplets, init, config);
      CHECK(r.report.final_loss < r.report.initial_loss);
      CHECK(r.report.loss_curve.size() == 10);
      CHECK(r.report.loss_curve.back() <= r.report.loss_curve.front());
    }
  }

  TEST_CASE("determinism and zero iterations") {
    auto base = hash_featurizer(16, 2);
    const auto corpus = faqir::testing::toy_corpus();
    const auto pairs = generate_all_pairs(corpus);
    auto config = quick_config(Objective::kContrastive);
    const auto a = train_head(corpus, *base, std::span<const QuestionPair>(pairs), config);
    const auto b = train_head(corpus, *base, std::span<const QuestionPair>(pairs), config);
    CHECK(a.head.weight == b.head.weight);
    CHECK(a.report.loss_curve == b.report.loss_curve);
    config.seed = 6;
    const auto c = train_head(corpus, *base, std::span<const QuestionPair>(pairs), config);
    CHECK(c.head.weight != a.head.weight);

    config.iterations = 0;
    auto init = head_init(16, 16, 8);
    init.version = 4;
    const auto z = train_head(corpus, *base, std::span<const QuestionPair>(pairs), config, &init);
    CHECK(z.head.weight == init.weight);
    CHECK(z.head.bias == init.bias);
    CHECK(z.head.version == 5);
    CHECK(z.report.loss_curve.empty());
  }

  TEST_CASE("non-finite gradients abort training") {
    auto base = hash_featurizer(16, 2);
    const auto corpus = faqir::testing::toy_corpus();
    const auto pairs = generate_all_pairs(corpus);
    TrainHooks hooks;
    hooks.on_gradients = [](std::size_t step, HeadGradients& g) {
      if (step == 3) g.bias[0] = std::numeric_limits<float>::infinity();
    };
    try {
      train_head(corpus, *base, std::span<const QuestionPair>(pairs), quick_config(Objective::kContrastive),
                 nullptr, hooks);
      FAIL("expected kNumerical");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNumerical);
    }
  }

  TEST_CASE("objective and training set must agree") {
    auto base = hash_featurizer(8, 2);
    const auto corpus = faqir::testing::toy_corpus();
    const auto pairs = generate_all_pairs(corpus);
    CHECK_THROWS_AS(train_head(corpus, *base, std::span<const QuestionPair>(pairs),
                               quick_config(Objective::kTriplet)),
                    Error);
    const std::vector<Triplet> none;
    CHECK_THROWS_AS(train_head(corpus, *base, std::span<const Triplet>(none), quick_config(Objective::kTriplet)),
                    Error);
    const auto rows = embed_rows(corpus, *base);
    const std::vector<RowPair> bad{{0, 99, 1}};
    CHECK_THROWS_AS(train_rows(rows, bad, {}, head_init(8, 8, 1), quick_config(Objective::kContrastive)), Error);
  }

  TEST_CASE("fine_tune with the triplet objective") {
    auto base = hash_featurizer(16, 2);
    const auto corpus = faqir::testing::toy_corpus();
    SamplingConfig sampling;
    const auto r = fine_tune(corpus, *base, head_init(16, 16, 1), quick_config(Objective::kTriplet), sampling);
    CHECK(r.head.version == 1);
    CHECK(r.report.final_loss <= r.report.initial_loss);
  }

  TEST_CASE("pre-train with zero iterations reduces to fine-tuning") {
    auto base = hash_featurizer(16, 2);
    SyntheticSpec spec;
    spec.num_intents = 4;
    spec.train_per_intent = 3;
    spec.tenant_id = "other";
    const FaqCorpus others[] = {make_synthetic_corpus(spec)};
    const auto tenant = faqir::testing::toy_corpus("t");
    auto pt = quick_config(Objective::kTriplet);
    pt.iterations = 0;
    const auto ft = quick_config(Objective::kContrastive);
    PretrainOptions options;
    options.triplets_per_dataset = 50;
    const auto combined = pretrain_then_finetune(others, tenant, *base, pt, ft, options);
    const auto alone = fine_tune(tenant, *base, head_init(16, 16, ft.seed, 0.01f, "t"), ft, options.sampling);
    CHECK(combined.tenant_head.weight == alone.head.weight);
    CHECK(combined.tenant_head.tenant_id == "t");
    CHECK(combined.shared_head.weight == head_init(16, 16, ft.seed).weight);

    pt.iterations = 100;
    const auto trained = pretrain_then_finetune(others, tenant, *base, pt, ft, options);
    CHECK(trained.shared_head.weight != combined.shared_head.weight);
    CHECK(trained.pretrain_report.final_loss < trained.pretrain_report.initial_loss);
  }
}
