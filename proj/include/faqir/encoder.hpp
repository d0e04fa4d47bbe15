// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/embeddings.hpp"

namespace faqir {

// Frozen, shared text encoder. Implementations are read-only after
// construction and callable from many threads. Every live instance is
// counted so the server can assert there is exactly one.
class BaseEncoder {
 public:
  BaseEncoder();
  BaseEncoder(const BaseEncoder&) = delete;
  BaseEncoder& operator=(const BaseEncoder&) = delete;
  virtual ~BaseEncoder();

  virtual std::size_t dimension() const = 0;
  // Same text -> bitwise identical vector for the lifetime of the instance.
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;
  // Bytes of resident shared parameters.
  virtual std::size_t parameter_bytes() const { return 0; }
  virtual std::string name() const = 0;

  static std::size_t live_instances();
};

// Per-tenant trainable projection applied on top of the base embedding:
// encode(x) = normalize(W x + b). W is d_out x d_in, row-major.
struct TenantHead {
  std::string tenant_id;
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<float> weight;
  std::vector<float> bias;
  std::uint64_t version = 0;

  std::size_t parameter_count() const { return weight.size() + bias.size(); }
  std::size_t bytes() const { return parameter_count() * sizeof(float); }
  // Throws on shape mismatch or non-finite entries.
  void validate() const;
};

// W = truncated identity + epsilon * N(0, 1), b = 0, version 0.
TenantHead head_init(std::size_t d_in, std::size_t d_out, std::uint64_t seed,
                     float epsilon = 0.01f, std::string tenant_id = {});

// normalize(W x + b). Throws kDimensionMismatch or kNumerical (zero output).
EmbeddingVector apply_head(const TenantHead& head, std::span<const float> base_embedding);
EmbeddingVector encode(const BaseEncoder& base, const TenantHead& head, std::string_view text);

// Embeds every train question of the corpus, through the head when given.
QuestionEmbeddings embed_questions(const FaqCorpus& corpus, const BaseEncoder& base,
                                   const TenantHead* head = nullptr);

// Checkpoint: 8-byte magic "FAQHEAD1", u32 format version, u32 d_in,
// u32 d_out, u64 head version, u32 tenant id length + bytes, then W
// row-major and b as little-endian f32.
void save_head(const std::filesystem::path& path, const TenantHead& head);
TenantHead load_head(const std::filesystem::path& path);

}  // namespace faqir
