// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "faqir/error.hpp"
#include "faqir/sampling.hpp"
#include "faqir/synthetic.hpp"
#include "fixtures.hpp"

using namespace faqir;

namespace {

QuestionEmbeddings embeddings_2d(const std::vector<std::pair<float, float>>& points) {
  QuestionEmbeddings e(2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const float v[] = {points[i].first, points[i].second};
    e.add(QuestionId{static_cast<std::uint32_t>(i)}, v);
  }
  return e;
}

}  // namespace

TEST_SUITE("sampling") {
  TEST_CASE("all pairs: count, order, labels") {
    const auto c = faqir::testing::toy_corpus();
    const auto pairs = generate_all_pairs(c);
    CHECK(pairs.size() == 36);
    CHECK(pairs.front().a.value == 0);
    CHECK(pairs.front().b.value == 1);
    std::size_t positives = 0;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& p : pairs) {
      CHECK(p.a < p.b);
      seen.emplace(p.a.value, p.b.value);
      const bool same = c.entry(p.a).intent == c.entry(p.b).intent;
      CHECK(p.label == (same ? 1 : 0));
      positives += p.label;
    }
    CHECK(seen.size() == 36);
    CHECK(positives == 9);  // 3 intents x C(3,2)
  }

  TEST_CASE("pair counts are C(N,2) for corpus sizes from the published splits") {
    for (std::size_t n : {2u, 3u, 180u, 385u, 600u}) {
      std::vector<std::size_t> counts(n / 2 + n % 2, 2);
      if (n % 2) counts.back() = 1;
      const auto c = make_sized_corpus("t", counts);
      REQUIRE(c.size() == n);
      CHECK(generate_all_pairs(c).size() == n * (n - 1) / 2);
    }
    CHECK_THROWS_AS(generate_all_pairs(make_corpus("t", {{"only", "a"}})), Error);
  }

  TEST_CASE("weights: cosine for negatives, 1 - cosine for positives, floored") {
    const auto e = embeddings_2d({{1, 0}, {1, 0}, {0, 1}, {-1, 0}});
    std::vector<QuestionPair> pairs = {{QuestionId{0}, QuestionId{1}, 1, 0},
                                       {QuestionId{0}, QuestionId{2}, 0, 0},
                                       {QuestionId{0}, QuestionId{3}, 0, 0},
                                       {QuestionId{0}, QuestionId{3}, 1, 0},
                                       {QuestionId{0}, QuestionId{1}, 0, 0}};
    compute_pair_weights(pairs, e, 1e-6);
    CHECK(pairs[0].weight == doctest::Approx(1e-6));  // identical positive: floor
    CHECK(pairs[1].weight == doctest::Approx(1e-6));  // orthogonal negative: floor
    CHECK(pairs[2].weight == doctest::Approx(1e-6));  // opposite negative: floor
    CHECK(pairs[3].weight == doctest::Approx(2.0));   // opposite positive: hardest
    CHECK(pairs[4].weight == doctest::Approx(1.0));   // identical negative: hardest
  }

  TEST_CASE("hard sampling below the cap returns the pairs unchanged") {
    const auto c = faqir::testing::toy_corpus();
    const auto pairs = generate_all_pairs(c);
    Rng rng(1);
    const auto out = hard_sample(pairs, SamplingConfig{}, rng);
    REQUIRE(out.size() == pairs.size());
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].a == pairs[i].a);
  }

  TEST_CASE("cap keeps the label proportion and balanced mode splits evenly") {
    std::vector<QuestionPair> pairs;
    for (std::uint32_t i = 0; i < 1000; ++i) pairs.push_back({QuestionId{i}, QuestionId{i + 1}, i < 100, 1.0});
    SamplingConfig cfg;
    cfg.cap = 50;
    Rng rng(3);
    auto out = hard_sample(pairs, cfg, rng);
    CHECK(out.size() == 50);
    std::size_t pos = 0;
    for (const auto& p : out) pos += p.label;
    CHECK(pos == 5);

    cfg.balanced_size = 40;
    out = hard_sample(pairs, cfg, rng);
    pos = 0;
    for (const auto& p : out) pos += p.label;
    CHECK(out.size() == 40);
    CHECK(pos == 20);

    cfg.balanced_size = 41;
    CHECK_THROWS_AS(hard_sample(pairs, cfg, rng), Error);
  }

  TEST_CASE("draw frequencies follow the weights (chi-square)") {
    // Four negatives with weights 1:2:3:4 drawn 40000 times.
    std::vector<QuestionPair> pairs;
    for (std::uint32_t i = 0; i < 4; ++i) pairs.push_back({QuestionId{i}, QuestionId{i + 10}, 0, i + 1.0});
    SamplingConfig cfg;
    cfg.balanced_size = 80000;
    pairs.push_back({QuestionId{100}, QuestionId{101}, 1, 1.0});
    Rng rng(17);
    const auto out = hard_sample(pairs, cfg, rng);
    std::map<std::uint32_t, double> counts;
    for (const auto& p : out) {
      if (p.label == 0) counts[p.a.value] += 1;
    }
    double chi2 = 0.0;
    for (std::uint32_t i = 0; i < 4; ++i) {
      const double expected = 40000.0 * (i + 1) / 10.0;
      chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    // 3 degrees of freedom; 16.27 is the 0.999 quantile.
    CHECK(chi2 < 16.27);
  }

  TEST_CASE("sampling is reproducible for a fixed seed") {
    std::vector<QuestionPair> pairs;
    for (std::uint32_t i = 0; i < 300; ++i) pairs.push_back({QuestionId{i}, QuestionId{i + 1}, i % 3 == 0, 0.1 + i % 7});
    SamplingConfig cfg;
    cfg.cap = 100;
    Rng a(5), b(5);
    const auto x = hard_sample(pairs, cfg, a), y = hard_sample(pairs, cfg, b);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].a == y[i].a);
  }

  TEST_CASE("the four-question fixture yields exactly the 8 valid triplets") {
    // Intents {0,1} -> A and {2,3} -> B: every anchor has one positive and
    // two negatives, so there are 4 x 1 x 2 = 8 distinct triplets.
    const auto c = make_corpus("t", {{"q0", "A"}, {"q1", "A"}, {"q2", "B"}, {"q3", "B"}});
    const auto pairs = generate_all_pairs(c);
    Rng rng(8);
    const auto triplets = build_triplets(c, pairs, 4000, rng);
    REQUIRE(triplets.size() == 4000);
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> distinct;
    for (const auto& t : triplets) {
      CHECK(c.entry(t.anchor).intent == c.entry(t.positive).intent);
      CHECK(c.entry(t.anchor).intent != c.entry(t.negative).intent);
      CHECK(t.anchor != t.positive);
      distinct.emplace(t.anchor.value, t.positive.value, t.negative.value);
    }
    const std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> expected = {
        {0, 1, 2}, {0, 1, 3}, {1, 0, 2}, {1, 0, 3}, {2, 3, 0}, {2, 3, 1}, {3, 2, 0}, {3, 2, 1}};
    CHECK(distinct == expected);
  }

  TEST_CASE("triplets skip anchors without positives and need two intents") {
    const auto c = make_corpus("t", {{"q0", "A"}, {"q1", "A"}, {"q2", "B"}});
    Rng rng(2);
    const auto triplets = build_triplets(c, generate_all_pairs(c), 10, rng);
    for (const auto& t : triplets) CHECK(t.anchor.value != 2);
    const auto single = make_corpus("t", {{"q0", "A"}, {"q1", "A"}});
    CHECK_THROWS_AS(build_triplets(single, generate_all_pairs(single), 1, rng), Error);
  }

  TEST_CASE("pre-train mixture tags its datasets") {
    SyntheticSpec s1, s2;
    s1.tenant_id = "d1";
    s2.tenant_id = "d2";
    s1.num_intents = s2.num_intents = 4;
    std::vector<FaqCorpus> corpora = {make_synthetic_corpus(s1), make_synthetic_corpus(s2)};
    std::vector<QuestionEmbeddings> emb;
    for (const auto& c : corpora) {
      QuestionEmbeddings e(2);
      for (const auto& q : c.train()) {
        const float v[] = {1.0f, static_cast<float>(q.id.value)};
        e.add(q.id, v);
      }
      emb.push_back(std::move(e));
    }
    const auto mixture = build_pretrain_mixture(corpora, emb, 30, SamplingConfig{});
    CHECK(mixture.size() == 60);
    std::size_t first = 0;
    for (const auto& t : mixture) {
      REQUIRE(t.dataset < 2);
      const auto& c = corpora[t.dataset];
      CHECK(c.entry(t.triplet.anchor).intent == c.entry(t.triplet.positive).intent);
      CHECK(c.entry(t.triplet.anchor).intent != c.entry(t.triplet.negative).intent);
      first += t.dataset == 0;
    }
    CHECK(first == 30);
  }

  TEST_CASE("pair and triplet files round-trip exactly") {
    std::vector<QuestionPair> pairs = {{QuestionId{1}, QuestionId{2}, 1, 0.1234567890123456789},
                                       {QuestionId{3}, QuestionId{9}, 0, 1e-6}};
    std::stringstream ss;
    write_pairs(ss, pairs);
    const auto back = read_pairs(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].weight == pairs[0].weight);
    CHECK(back[1].b.value == 9);
    CHECK(back[1].label == 0);

    std::vector<TaggedTriplet> triplets = {{1, {QuestionId{4}, QuestionId{5}, QuestionId{6}}}};
    std::stringstream ts;
    write_triplets(ts, triplets);
    const auto tb = read_triplets(ts);
    REQUIRE(tb.size() == 1);
    CHECK(tb[0].dataset == 1);
    CHECK(tb[0].triplet.negative.value == 6);

    std::stringstream bad("1\t2\tx\t0.5\n");
    CHECK_THROWS_AS(read_pairs(bad), Error);
  }
}
