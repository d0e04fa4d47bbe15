// SPDX-License-Identifier: Apache-2.0
#include "faqir/encoder.hpp"

#include <atomic>
#include <cmath>
#include <fstream>

#include "faqir/error.hpp"
#include "faqir/rng.hpp"
#include "faqir/simd/kernels.hpp"
#include "byte_io.hpp"

namespace faqir {
namespace {
std::atomic<std::size_t> g_live_encoders{0};
}  // namespace

BaseEncoder::BaseEncoder() { g_live_encoders.fetch_add(1, std::memory_order_relaxed); }
BaseEncoder::~BaseEncoder() { g_live_encoders.fetch_sub(1, std::memory_order_relaxed); }
std::size_t BaseEncoder::live_instances() { return g_live_encoders.load(); }

std::vector<EmbeddingVector> BaseEncoder::embed_batch(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

void normalize_in_place(std::span<float> v) {
  const double norm = l2_norm(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(ErrorCode::kNumerical, "cannot normalize a zero or non-finite vector");
  }
  const float inv = static_cast<float>(1.0 / norm);
  for (auto& x : v) x *= inv;
}

double l2_norm(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * x;
  return std::sqrt(sum);
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) fail(ErrorCode::kDimensionMismatch, "cosine of different lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorCode::kNumerical, "cosine of a zero-norm vector");
  return dot / std::sqrt(na * nb);
}

bool all_finite(std::span<const float> v) {
  for (float x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void QuestionEmbeddings::add(QuestionId id, std::span<const float> values) {
  if (dimension_ == 0) dimension_ = values.size();
  if (values.size() != dimension_) {
    fail(ErrorCode::kDimensionMismatch, "embedding dimension " + std::to_string(values.size()) +
                                            " != " + std::to_string(dimension_));
  }
  if (!rows_.emplace(id.value, rows_.size()).second) {
    fail(ErrorCode::kConflict, "duplicate embedding for question " + std::to_string(id.value));
  }
  data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const float> QuestionEmbeddings::at(QuestionId id) const {
  auto it = rows_.find(id.value);
  if (it == rows_.end()) {
    fail(ErrorCode::kNotFound, "no embedding for question " + std::to_string(id.value));
  }
  return {data_.data() + it->second * dimension_, dimension_};
}

void TenantHead::validate() const {
  if (d_in == 0 || d_out == 0) fail(ErrorCode::kInvalidArgument, "head dimensions must be > 0");
  if (weight.size() != d_in * d_out || bias.size() != d_out) {
    fail(ErrorCode::kDimensionMismatch, "head tensors do not match declared dimensions");
  }
  if (!all_finite(weight) || !all_finite(bias)) {
    fail(ErrorCode::kNumerical, "head has non-finite entries");
  }
}

TenantHead head_init(std::size_t d_in, std::size_t d_out, std::uint64_t seed, float epsilon,
                     std::string tenant_id) {
  if (d_in == 0 || d_out == 0) fail(ErrorCode::kInvalidArgument, "head dimensions must be > 0");
  TenantHead head;
  head.tenant_id = std::move(tenant_id);
  head.d_in = d_in;
  head.d_out = d_out;
  head.weight.assign(d_in * d_out, 0.0f);
  head.bias.assign(d_out, 0.0f);
  Rng rng = Rng::derive(seed, 0x4EAD);
  for (std::size_t r = 0; r < d_out; ++r) {
    for (std::size_t c = 0; c < d_in; ++c) {
      const float noise = epsilon == 0.0f ? 0.0f : epsilon * static_cast<float>(rng.normal());
      head.weight[r * d_in + c] = (r == c ? 1.0f : 0.0f) + noise;
    }
  }
  return head;
}

EmbeddingVector apply_head(const TenantHead& head, std::span<const float> base_embedding) {
  if (base_embedding.size() != head.d_in) {
    fail(ErrorCode::kDimensionMismatch, "base embedding has dimension " +
                                            std::to_string(base_embedding.size()) +
                                            ", head expects " + std::to_string(head.d_in));
  }
  EmbeddingVector out;
  out.values.resize(head.d_out);
  simd::active().gemv(head.weight.data(), base_embedding.data(), head.bias.data(),
                      out.values.data(), head.d_out, head.d_in);
  normalize_in_place(out.values);
  out.normalized = true;
  return out;
}

EmbeddingVector encode(const BaseEncoder& base, const TenantHead& head, std::string_view text) {
  if (base.dimension() != head.d_in) {
    fail(ErrorCode::kDimensionMismatch, "base dimension " + std::to_string(base.dimension()) +
                                            " != head d_in " + std::to_string(head.d_in));
  }
  return apply_head(head, base.embed(text).values);
}

QuestionEmbeddings embed_questions(const FaqCorpus& corpus, const BaseEncoder& base,
                                   const TenantHead* head) {
  QuestionEmbeddings out(head ? head->d_out : base.dimension());
  for (const auto& e : corpus.train()) {
    try {
      auto v = head ? encode(base, *head, e.text) : base.embed(e.text);
      out.add(e.id, v.values);
    } catch (const Error& err) {
      fail(err.code(), "question " + std::to_string(e.id.value) + ": " + err.what());
    }
  }
  return out;
}

namespace {
constexpr char kHeadMagic[8] = {'F', 'A', 'Q', 'H', 'E', 'A', 'D', '1'};
constexpr std::uint32_t kHeadFormatVersion = 1;
}  // namespace

void save_head(const std::filesystem::path& path, const TenantHead& head) {
  head.validate();
  ByteWriter w;
  w.bytes(kHeadMagic, sizeof(kHeadMagic));
  w.u32(kHeadFormatVersion);
  w.u32(static_cast<std::uint32_t>(head.d_in));
  w.u32(static_cast<std::uint32_t>(head.d_out));
  w.u64(head.version);
  w.u32(static_cast<std::uint32_t>(head.tenant_id.size()));
  w.bytes(head.tenant_id.data(), head.tenant_id.size());
  for (float x : head.weight) w.f32(x);
  for (float x : head.bias) w.f32(x);
  w.write_file(path);
}

TenantHead load_head(const std::filesystem::path& path) {
  ByteReader r = ByteReader::from_file(path);
  char magic[8];
  r.bytes(magic, sizeof(magic), "magic");
  if (std::string_view(magic, 8) != std::string_view(kHeadMagic, 8)) {
    fail(ErrorCode::kParse, path.string() + ": bad checkpoint magic at byte 0");
  }
  const auto format = r.u32("format version");
  if (format != kHeadFormatVersion) {
    fail(ErrorCode::kParse, path.string() + ": unsupported checkpoint version " + std::to_string(format));
  }
  TenantHead head;
  head.d_in = r.u32("d_in");
  head.d_out = r.u32("d_out");
  head.version = r.u64("head version");
  const auto id_len = r.u32("tenant id length");
  head.tenant_id.resize(id_len);
  r.bytes(head.tenant_id.data(), id_len, "tenant id");
  if (head.d_in == 0 || head.d_out == 0) fail(ErrorCode::kParse, path.string() + ": zero dimension");
  head.weight.resize(head.d_in * head.d_out);
  head.bias.resize(head.d_out);
  for (auto& x : head.weight) x = r.f32("weight");
  for (auto& x : head.bias) x = r.f32("bias");
  r.expect_end();
  head.validate();
  return head;
}

}  // namespace faqir
