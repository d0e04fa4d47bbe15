// SPDX-License-Identifier: Apache-2.0
#pragma once

// Precomputed base embeddings on disk.
//
// Layout (all integers and floats little-endian):
//   header  : 8-byte magic "FAQEMB01", u32 version (1), u32 dim, u64 count
//   record* : u64 id, u32 text byte length, UTF-8 text bytes, dim x f32
//
// Texts are keyed by their exact bytes; no normalization is applied.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faqir/encoder.hpp"

namespace faqir {

inline constexpr char kEmbeddingMagic[8] = {'F', 'A', 'Q', 'E', 'M', 'B', '0', '1'};
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

struct EmbeddingRecord {
  std::uint64_t id = 0;
  std::string text;
  std::vector<float> values;
};

struct EmbeddingFileContents {
  std::uint32_t dimension = 0;
  std::vector<EmbeddingRecord> records;
};

void write_embedding_file(const std::filesystem::path& path, std::uint32_t dimension,
                          const std::vector<EmbeddingRecord>& records);
// Throws kParse naming the byte offset for a bad magic, zero dimension,
// count mismatch or truncated record.
EmbeddingFileContents read_embedding_file(const std::filesystem::path& path);

// Base encoder answering embed(text) by exact-text lookup.
class LookupEncoder final : public BaseEncoder {
 public:
  explicit LookupEncoder(EmbeddingFileContents contents, std::string source = {});

  std::size_t dimension() const override { return dimension_; }
  // Throws kNotFound for text that is not in the file.
  EmbeddingVector embed(std::string_view text) const override;
  std::size_t parameter_bytes() const override { return data_.size() * sizeof(float); }
  std::string name() const override { return "lookup:" + source_; }

  std::size_t size() const { return rows_.size(); }
  bool contains(std::string_view text) const { return rows_.contains(std::string(text)); }

 private:
  std::size_t dimension_;
  std::string source_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> rows_;
};

std::unique_ptr<LookupEncoder> load_embedding_file(const std::filesystem::path& path);

}  // namespace faqir
