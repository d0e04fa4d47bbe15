// SPDX-License-Identifier: Apache-2.0
#include "faqir/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

#include "faqir/error.hpp"

namespace faqir {

void SamplingConfig::validate() const {
  if (cap == 0) fail(ErrorCode::kInvalidArgument, "sampling.cap must be > 0");
  if (balanced_size && (*balanced_size == 0 || *balanced_size % 2 != 0)) {
    fail(ErrorCode::kInvalidArgument, "sampling.balanced_size must be a positive even count");
  }
  if (!(weight_floor > 0.0) || !std::isfinite(weight_floor)) {
    fail(ErrorCode::kInvalidArgument, "sampling.weight_floor must be a small positive real");
  }
}

std::vector<QuestionPair> generate_all_pairs(const FaqCorpus& corpus) {
  const std::size_t n = corpus.size();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "pair generation needs at least 2 questions");
  const auto& train = corpus.train();
  const auto& intent = corpus.train_intent_ids();
  std::vector<QuestionPair> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pairs.push_back(QuestionPair{train[i].id, train[j].id,
                                   static_cast<std::uint8_t>(intent[i] == intent[j] ? 1 : 0), 1.0});
    }
  }
  return pairs;
}

void compute_pair_weights(std::span<QuestionPair> pairs, const QuestionEmbeddings& embeddings,
                          double weight_floor) {
  if (!(weight_floor > 0.0)) fail(ErrorCode::kInvalidArgument, "weight_floor must be > 0");
  for (auto& p : pairs) {
    const double cos = cosine(embeddings.at(p.a), embeddings.at(p.b));
    const double raw = p.label == 1 ? 1.0 - cos : cos;
    p.weight = std::max(weight_floor, raw);
  }
}

namespace {

// Cumulative-weight table for draws proportional to weight.
class WeightedIndex {
 public:
  explicit WeightedIndex(std::vector<double> weights) {
    cumulative_.reserve(weights.size());
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::kNumerical, "invalid sampling weight");
      total += w;
      cumulative_.push_back(total);
    }
  }

  bool empty() const { return cumulative_.empty(); }
  double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  std::size_t draw(Rng& rng) const {
    const double target = rng.uniform01() * total();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

void draw_label(const std::vector<const QuestionPair*>& pool, std::size_t count, int label,
                Rng& rng, std::vector<QuestionPair>& out) {
  if (count == 0) return;
  if (pool.empty()) {
    fail(ErrorCode::kInvalidArgument,
         "hard_sample: no pairs with label " + std::to_string(label) + " to draw from");
  }
  std::vector<double> weights;
  weights.reserve(pool.size());
  for (const auto* p : pool) weights.push_back(p->weight);
  WeightedIndex index(std::move(weights));
  if (!(index.total() > 0.0)) {
    fail(ErrorCode::kNumerical,
         "hard_sample: label " + std::to_string(label) + " has zero total weight");
  }
  for (std::size_t i = 0; i < count; ++i) out.push_back(*pool[index.draw(rng)]);
}

}  // namespace

std::vector<QuestionPair> hard_sample(std::span<const QuestionPair> pairs,
                                      const SamplingConfig& config, Rng& rng) {
  config.validate();
  std::vector<const QuestionPair*> positives;
  std::vector<const QuestionPair*> negatives;
  for (const auto& p : pairs) (p.label == 1 ? positives : negatives).push_back(&p);

  std::size_t want_pos = 0;
  std::size_t want_neg = 0;
  if (config.balanced_size) {
    want_pos = want_neg = *config.balanced_size / 2;
  } else if (pairs.size() > config.cap) {
    const double share = static_cast<double>(positives.size()) / static_cast<double>(pairs.size());
    want_pos = static_cast<std::size_t>(std::llround(share * static_cast<double>(config.cap)));
    want_neg = config.cap - want_pos;
  } else {
    return {pairs.begin(), pairs.end()};
  }

  std::vector<QuestionPair> out;
  out.reserve(want_pos + want_neg);
  // Labels drawn from separate streams so each is reproducible on its own.
  Rng pos_rng = Rng::derive(rng.next(), 1);
  Rng neg_rng = Rng::derive(rng.next(), 0);
  draw_label(positives, want_pos, 1, pos_rng, out);
  draw_label(negatives, want_neg, 0, neg_rng, out);
  return out;
}

std::vector<Triplet> build_triplets(const FaqCorpus& corpus, std::span<const QuestionPair> pairs,
                                    std::size_t count, Rng& rng) {
  if (corpus.intents().size() < 2) {
    fail(ErrorCode::kInvalidArgument, "triplets need at least two intents (no negatives)");
  }
  if (count == 0) return {};

  struct Neighbours {
    std::vector<QuestionId> ids[2];
    std::vector<double> weights[2];
  };
  std::unordered_map<std::uint32_t, Neighbours> adjacency;
  // The label constraint is taken from the corpus, not from the pair labels,
  // so replayed or hand-edited pair files cannot produce invalid triplets.
  const auto& intent_of = corpus.train_intent_ids();
  for (const auto& p : pairs) {
    if (p.a == p.b) continue;
    const int same = intent_of[corpus.position(p.a)] == intent_of[corpus.position(p.b)] ? 1 : 0;
    auto& na = adjacency[p.a.value];
    na.ids[same].push_back(p.b);
    na.weights[same].push_back(p.weight);
    auto& nb = adjacency[p.b.value];
    nb.ids[same].push_back(p.a);
    nb.weights[same].push_back(p.weight);
  }

  struct Anchor {
    QuestionId id;
    std::vector<QuestionId> positives;
    std::vector<QuestionId> negatives;
    WeightedIndex positive_draw;
    WeightedIndex negative_draw;
  };
  std::vector<Anchor> anchors;
  for (const auto& entry : corpus.train()) {
    auto it = adjacency.find(entry.id.value);
    if (it == adjacency.end()) continue;
    auto& n = it->second;
    if (n.ids[1].empty() || n.ids[0].empty()) continue;
    anchors.push_back(Anchor{entry.id, n.ids[1], n.ids[0], WeightedIndex(n.weights[1]),
                             WeightedIndex(n.weights[0])});
  }
  if (anchors.empty()) return {};

  std::vector<std::size_t> order(anchors.size());
  std::vector<Triplet> out;
  out.reserve(count);
  while (out.size() < count) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i < order.size() && out.size() < count; ++i) {
      const Anchor& a = anchors[order[i]];
      const QuestionId pos = a.positives[a.positive_draw.draw(rng)];
      const QuestionId neg = a.negatives[a.negative_draw.draw(rng)];
      out.push_back(Triplet{a.id, pos, neg});
    }
  }
  return out;
}

std::vector<TaggedTriplet> build_pretrain_mixture(std::span<const FaqCorpus> corpora,
                                                  std::span<const QuestionEmbeddings> embeddings,
                                                  std::size_t per_dataset,
                                                  const SamplingConfig& config) {
  config.validate();
  if (corpora.empty()) fail(ErrorCode::kInvalidArgument, "pre-train mixture needs >= 1 corpus");
  if (embeddings.size() != corpora.size()) {
    fail(ErrorCode::kInvalidArgument, "one embedding table per corpus is required");
  }
  std::vector<TaggedTriplet> mixture;
  mixture.reserve(per_dataset * corpora.size());
  for (std::size_t d = 0; d < corpora.size(); ++d) {
    auto pairs = generate_all_pairs(corpora[d]);
    compute_pair_weights(pairs, embeddings[d], config.weight_floor);
    Rng rng = Rng::derive(config.seed, 0x7E1 + d);
    for (const auto& t : build_triplets(corpora[d], pairs, per_dataset, rng)) {
      mixture.push_back(TaggedTriplet{d, t});
    }
  }
  Rng shuffle_rng = Rng::derive(config.seed, 0x5F);
  shuffle_rng.shuffle(std::span<TaggedTriplet>(mixture));
  return mixture;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::uint64_t parse_uint(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::kParse, "line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void write_pairs(std::ostream& out, std::span<const QuestionPair> pairs) {
  char buf[64];
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.weight);
    out << p.a.value << '\t' << p.b.value << '\t' << static_cast<int>(p.label) << '\t' << buf
        << '\n';
  }
}

std::vector<QuestionPair> read_pairs(std::istream& in) {
  std::vector<QuestionPair> pairs;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto parts = split_tabs(line);
    if (parts.size() != 4) fail(ErrorCode::kParse, "line " + std::to_string(n) + ": expected 4 fields");
    QuestionPair p;
    p.a = QuestionId{static_cast<std::uint32_t>(parse_uint(parts[0], n))};
    p.b = QuestionId{static_cast<std::uint32_t>(parse_uint(parts[1], n))};
    const auto label = parse_uint(parts[2], n);
    if (label > 1) fail(ErrorCode::kParse, "line " + std::to_string(n) + ": label must be 0 or 1");
    p.label = static_cast<std::uint8_t>(label);
    try {
      p.weight = std::stod(std::string(parts[3]));
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "line " + std::to_string(n) + ": bad weight");
    }
    pairs.push_back(p);
  }
  return pairs;
}

void write_triplets(std::ostream& out, std::span<const TaggedTriplet> triplets) {
  for (const auto& t : triplets) {
    out << t.dataset << '\t' << t.triplet.anchor.value << '\t' << t.triplet.positive.value << '\t'
        << t.triplet.negative.value << '\n';
  }
}

std::vector<TaggedTriplet> read_triplets(std::istream& in) {
  std::vector<TaggedTriplet> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto parts = split_tabs(line);
    if (parts.size() != 4) fail(ErrorCode::kParse, "line " + std::to_string(n) + ": expected 4 fields");
    out.push_back(TaggedTriplet{
        static_cast<std::size_t>(parse_uint(parts[0], n)),
        Triplet{QuestionId{static_cast<std::uint32_t>(parse_uint(parts[1], n))},
                QuestionId{static_cast<std::uint32_t>(parse_uint(parts[2], n))},
                QuestionId{static_cast<std::uint32_t>(parse_uint(parts[3], n))}}});
  }
  return out;
}

}  // namespace faqir
