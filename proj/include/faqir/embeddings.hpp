// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "faqir/corpus.hpp"

namespace faqir {

struct EmbeddingVector {
  std::vector<float> values;
  bool normalized = false;

  std::size_t dimension() const { return values.size(); }
};

// Scales v to unit L2 norm. Throws kNumerical for a zero or non-finite vector.
void normalize_in_place(std::span<float> v);
double l2_norm(std::span<const float> v);
// Cosine of two vectors of equal length; throws kNumerical on a zero norm.
double cosine(std::span<const float> a, std::span<const float> b);
bool all_finite(std::span<const float> v);

// Question id -> embedding, stored as one contiguous row-major block.
class QuestionEmbeddings {
 public:
  explicit QuestionEmbeddings(std::size_t dimension = 0) : dimension_(dimension) {}

  void add(QuestionId id, std::span<const float> values);
  // Throws kNotFound for an unknown id.
  std::span<const float> at(QuestionId id) const;
  bool contains(QuestionId id) const { return rows_.contains(id.value); }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return rows_.size(); }

 private:
  std::size_t dimension_;
  std::vector<float> data_;
  std::unordered_map<std::uint32_t, std::size_t> rows_;
};

}  // namespace faqir
