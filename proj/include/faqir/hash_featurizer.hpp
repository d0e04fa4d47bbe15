// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/encoder.hpp"

namespace faqir {

struct HashFeaturizerOptions {
  std::size_t dimension = 384;
  std::uint64_t seed = 1;
  std::size_t buckets = std::size_t{1} << 14;
};

// Hermetic stand-in for a sentence encoder: character trigrams of the
// ASCII-lowercased text (padded with '^' and '$') are hashed into buckets,
// the bucket counts are projected through a fixed seeded +-1/sqrt(d)
// matrix and the result is L2-normalized. Text with no trigram maps to the
// unit basis vector e1.
class HashFeaturizer final : public BaseEncoder {
 public:
  explicit HashFeaturizer(HashFeaturizerOptions options);

  std::size_t dimension() const override { return options_.dimension; }
  EmbeddingVector embed(std::string_view text) const override;
  std::size_t parameter_bytes() const override { return projection_.size() * sizeof(float); }
  std::string name() const override;

  const HashFeaturizerOptions& options() const { return options_; }

 private:
  HashFeaturizerOptions options_;
  std::vector<float> projection_;  // buckets x dimension
};

std::unique_ptr<HashFeaturizer> hash_featurizer(std::size_t dimension, std::uint64_t seed);

}  // namespace faqir
