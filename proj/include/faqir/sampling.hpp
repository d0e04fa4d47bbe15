// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/embeddings.hpp"
#include "faqir/rng.hpp"

namespace faqir {

struct QuestionPair {
  QuestionId a;
  QuestionId b;
  std::uint8_t label = 0;  // 1 = same intent
  double weight = 1.0;
};

struct Triplet {
  QuestionId anchor;
  QuestionId positive;
  QuestionId negative;
};

// A triplet plus the index of the corpus it was drawn from.
struct TaggedTriplet {
  std::size_t dataset = 0;
  Triplet triplet;
};

struct SamplingConfig {
  std::size_t cap = 200000;
  std::optional<std::size_t> balanced_size;  // e.g. 50000; must be even
  std::uint64_t seed = 42;
  double weight_floor = 1e-6;

  void validate() const;
};

// All C(N,2) unordered pairs over the train questions, i < j in corpus
// order; label 1 iff both questions share an intent.
std::vector<QuestionPair> generate_all_pairs(const FaqCorpus& corpus);

// Hard-negative / hard-positive weights: label 0 pairs weigh their cosine,
// label 1 pairs weigh 1 - cosine, both floored at weight_floor.
void compute_pair_weights(std::span<QuestionPair> pairs, const QuestionEmbeddings& embeddings,
                          double weight_floor = 1e-6);

// Draws the training set with replacement, probability proportional to
// weight within each label. balanced_size -> balanced_size/2 per label;
// otherwise more than cap pairs -> cap pairs keeping the label proportion;
// otherwise the pairs are returned unchanged.
std::vector<QuestionPair> hard_sample(std::span<const QuestionPair> pairs,
                                      const SamplingConfig& config, Rng& rng);

// At most count triplets. Anchors are questions with at least one positive
// and one negative among the weighted pairs, visited round-robin in seeded
// order; positive and negative are drawn proportional to pair weight.
// Throws kInvalidArgument when the corpus has a single intent.
std::vector<Triplet> build_triplets(const FaqCorpus& corpus, std::span<const QuestionPair> pairs,
                                    std::size_t count, Rng& rng);

// Offline in-domain triplets: per_dataset triplets from each corpus (weights
// from that corpus' embeddings), concatenated and shuffled with config.seed.
std::vector<TaggedTriplet> build_pretrain_mixture(std::span<const FaqCorpus> corpora,
                                                  std::span<const QuestionEmbeddings> embeddings,
                                                  std::size_t per_dataset,
                                                  const SamplingConfig& config);

// Line-delimited audit format: "a<TAB>b<TAB>label<TAB>weight" per pair and
// "dataset<TAB>anchor<TAB>positive<TAB>negative" per triplet. Weights are
// written with 17 significant digits so replays are exact.
void write_pairs(std::ostream& out, std::span<const QuestionPair> pairs);
std::vector<QuestionPair> read_pairs(std::istream& in);
void write_triplets(std::ostream& out, std::span<const TaggedTriplet> triplets);
std::vector<TaggedTriplet> read_triplets(std::istream& in);

}  // namespace faqir
