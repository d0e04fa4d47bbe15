// SPDX-License-Identifier: Apache-2.0
#include "faqir/embedding_file.hpp"

#include <cmath>

#include "byte_io.hpp"
#include "faqir/error.hpp"

namespace faqir {

void write_embedding_file(const std::filesystem::path& path, std::uint32_t dimension,
                          const std::vector<EmbeddingRecord>& records) {
  if (dimension == 0) fail(ErrorCode::kInvalidArgument, "embedding dimension must be > 0");
  ByteWriter w;
  w.bytes(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  w.u32(kEmbeddingFormatVersion);
  w.u32(dimension);
  w.u64(records.size());
  for (const auto& r : records) {
    if (r.values.size() != dimension) {
      fail(ErrorCode::kDimensionMismatch, "record " + std::to_string(r.id) + " has dimension " +
                                              std::to_string(r.values.size()));
    }
    w.u64(r.id);
    w.u32(static_cast<std::uint32_t>(r.text.size()));
    w.bytes(r.text.data(), r.text.size());
    for (float x : r.values) w.f32(x);
  }
  w.write_file(path);
}

EmbeddingFileContents read_embedding_file(const std::filesystem::path& path) {
  ByteReader r = ByteReader::from_file(path);
  char magic[8];
  r.bytes(magic, sizeof(magic), "magic");
  if (std::string_view(magic, 8) != std::string_view(kEmbeddingMagic, 8)) {
    fail(ErrorCode::kParse, path.string() + ": bad magic at byte offset 0");
  }
  const std::size_t version_offset = r.offset();
  const auto version = r.u32("version");
  if (version != kEmbeddingFormatVersion) {
    fail(ErrorCode::kParse, path.string() + ": unsupported version " + std::to_string(version) +
                                " at byte offset " + std::to_string(version_offset));
  }
  const std::size_t dim_offset = r.offset();
  EmbeddingFileContents contents;
  contents.dimension = r.u32("dimension");
  if (contents.dimension == 0) {
    fail(ErrorCode::kParse, path.string() + ": dimension 0 at byte offset " + std::to_string(dim_offset));
  }
  const auto count = r.u64("record count");
  // Each record needs at least 12 + 4*dim bytes; reject impossible counts
  // before reserving.
  const std::size_t min_record = 12 + 4 * static_cast<std::size_t>(contents.dimension);
  if (count > r.remaining() / min_record) {
    fail(ErrorCode::kParse, path.string() + ": header declares " + std::to_string(count) +
                                " records but only " + std::to_string(r.remaining()) +
                                " bytes follow at byte offset " + std::to_string(r.offset()));
  }
  contents.records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    EmbeddingRecord rec;
    rec.id = r.u64("record id");
    const auto len = r.u32("text length");
    rec.text.resize(len);
    r.bytes(rec.text.data(), len, "text");
    rec.values.resize(contents.dimension);
    for (auto& x : rec.values) x = r.f32("vector");
    contents.records.push_back(std::move(rec));
  }
  r.expect_end();
  return contents;
}

LookupEncoder::LookupEncoder(EmbeddingFileContents contents, std::string source)
    : dimension_(contents.dimension), source_(std::move(source)) {
  if (dimension_ == 0) fail(ErrorCode::kInvalidArgument, "lookup encoder dimension must be > 0");
  data_.reserve(contents.records.size() * dimension_);
  for (auto& rec : contents.records) {
    if (rec.values.size() != dimension_) {
      fail(ErrorCode::kDimensionMismatch, "record " + std::to_string(rec.id) + " has wrong dimension");
    }
    if (!all_finite(rec.values)) {
      fail(ErrorCode::kNumerical, "record " + std::to_string(rec.id) + " has non-finite values");
    }
    if (rows_.emplace(std::move(rec.text), rows_.size()).second) {
      data_.insert(data_.end(), rec.values.begin(), rec.values.end());
    }
  }
}

EmbeddingVector LookupEncoder::embed(std::string_view text) const {
  auto it = rows_.find(std::string(text));
  if (it == rows_.end()) {
    fail(ErrorCode::kNotFound, "text not present in embedding file: \"" + std::string(text) + "\"");
  }
  EmbeddingVector out;
  const float* begin = data_.data() + it->second * dimension_;
  out.values.assign(begin, begin + dimension_);
  out.normalized = std::abs(l2_norm(out.values) - 1.0) <= 1e-6;
  return out;
}

std::unique_ptr<LookupEncoder> load_embedding_file(const std::filesystem::path& path) {
  return std::make_unique<LookupEncoder>(read_embedding_file(path), path.string());
}

}  // namespace faqir
