// SPDX-License-Identifier: Apache-2.0
#include "faqir/hash_featurizer.hpp"

#include <cmath>

#include "faqir/error.hpp"
#include "faqir/rng.hpp"
#include "faqir/simd/kernels.hpp"

namespace faqir {
namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

HashFeaturizer::HashFeaturizer(HashFeaturizerOptions options) : options_(options) {
  if (options_.dimension == 0) fail(ErrorCode::kInvalidArgument, "hash featurizer dimension must be > 0");
  if (options_.buckets == 0) fail(ErrorCode::kInvalidArgument, "hash featurizer needs >= 1 bucket");
  const float scale = 1.0f / std::sqrt(static_cast<float>(options_.dimension));
  projection_.resize(options_.buckets * options_.dimension);
  const std::uint64_t base = splitmix64(options_.seed ^ 0xFEA7ULL);
  for (std::size_t i = 0; i < projection_.size(); i += 64) {
    const std::uint64_t bits = splitmix64(base + i);
    const std::size_t n = std::min<std::size_t>(64, projection_.size() - i);
    for (std::size_t b = 0; b < n; ++b) projection_[i + b] = ((bits >> b) & 1U) ? scale : -scale;
  }
}

EmbeddingVector HashFeaturizer::embed(std::string_view text) const {
  std::string padded;
  padded.reserve(text.size() + 2);
  padded.push_back('^');
  for (char c : text) {
    padded.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  padded.push_back('$');

  const std::size_t d = options_.dimension;
  EmbeddingVector out;
  out.values.assign(d, 0.0f);
  const auto& kernels = simd::active();
  std::size_t grams = 0;
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const std::size_t bucket = fnv1a(std::string_view(padded).substr(i, 3), options_.seed) % options_.buckets;
    kernels.axpy(1.0f, projection_.data() + bucket * d, out.values.data(), d);
    ++grams;
  }
  double norm = 0.0;
  if (grams > 0) norm = l2_norm(out.values);
  if (!(norm > 0.0)) {
    std::fill(out.values.begin(), out.values.end(), 0.0f);
    out.values[0] = 1.0f;
  } else {
    const float inv = static_cast<float>(1.0 / norm);
    for (auto& x : out.values) x *= inv;
  }
  out.normalized = true;
  return out;
}

std::string HashFeaturizer::name() const {
  return "hash:" + std::to_string(options_.dimension) + "," + std::to_string(options_.seed) + "," +
         std::to_string(options_.buckets);
}

std::unique_ptr<HashFeaturizer> hash_featurizer(std::size_t dimension, std::uint64_t seed) {
  return std::make_unique<HashFeaturizer>(HashFeaturizerOptions{dimension, seed});
}

}  // namespace faqir
