// SPDX-License-Identifier: Apache-2.0
#include "faqir/losses.hpp"

#include <algorithm>
#include <cmath>

#include "faqir/error.hpp"

namespace faqir {
namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct CosineTerm {
  double value;
  double norm_a;
  double norm_b;
};

CosineTerm cosine_term(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kDimensionMismatch, "loss inputs differ in length");
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorCode::kNumerical, "loss input has zero norm");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return {dot / (na * nb), na, nb};
}

// out += scale * d cos(a, b) / d a
void add_cosine_grad(std::span<const double> a, std::span<const double> b, const CosineTerm& c,
                     double scale, std::vector<double>& out) {
  const double inv_ab = 1.0 / (c.norm_a * c.norm_b);
  const double inv_aa = c.value / (c.norm_a * c.norm_a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += scale * (b[i] * inv_ab - a[i] * inv_aa);
}

}  // namespace

PairLoss contrastive_loss(std::span<const double> a, std::span<const double> b, int label,
                          double margin) {
  const CosineTerm c = cosine_term(a, b);
  const double d = 1.0 - c.value;
  PairLoss out;
  out.grad_a.assign(a.size(), 0.0);
  out.grad_b.assign(b.size(), 0.0);
  double dloss_dd = 0.0;
  if (label == 1) {
    out.loss = d * d;
    dloss_dd = 2.0 * d;
  } else {
    const double gap = margin - d;
    if (gap > 0.0) {
      out.loss = gap * gap;
      dloss_dd = -2.0 * gap;
    }
  }
  if (dloss_dd != 0.0) {
    // d(d)/d(cos) = -1
    add_cosine_grad(a, b, c, -dloss_dd, out.grad_a);
    add_cosine_grad(b, a, CosineTerm{c.value, c.norm_b, c.norm_a}, -dloss_dd, out.grad_b);
  }
  return out;
}

TripletLoss triplet_loss(std::span<const double> anchor, std::span<const double> positive,
                         std::span<const double> negative, double margin) {
  const CosineTerm ap = cosine_term(anchor, positive);
  const CosineTerm an = cosine_term(anchor, negative);
  TripletLoss out;
  out.grad_anchor.assign(anchor.size(), 0.0);
  out.grad_positive.assign(positive.size(), 0.0);
  out.grad_negative.assign(negative.size(), 0.0);
  const double raw = (1.0 - ap.value) - (1.0 - an.value) + margin;
  if (raw <= 0.0) return out;
  out.loss = raw;
  // loss = cos(a,n) - cos(a,p) + margin
  add_cosine_grad(anchor, positive, ap, -1.0, out.grad_anchor);
  add_cosine_grad(anchor, negative, an, 1.0, out.grad_anchor);
  add_cosine_grad(positive, anchor, CosineTerm{ap.value, ap.norm_b, ap.norm_a}, -1.0,
                  out.grad_positive);
  add_cosine_grad(negative, anchor, CosineTerm{an.value, an.norm_b, an.norm_a}, 1.0,
                  out.grad_negative);
  return out;
}

BatchLoss online_triplet_batch(std::span<const std::vector<double>> embeddings,
                               std::span<const std::uint32_t> labels, double margin,
                               TripletMining mining) {
  const std::size_t n = embeddings.size();
  if (labels.size() != n) fail(ErrorCode::kInvalidArgument, "one label per embedding required");
  BatchLoss out;
  out.grads.assign(n, std::vector<double>(n ? embeddings[0].size() : 0, 0.0));

  std::vector<double> cos(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      cos[i * n + j] = cos[j * n + i] = cosine_term(embeddings[i], embeddings[j]).value;
    }
  }

  struct Term {
    std::size_t a, p, n;
  };
  std::vector<Term> active;
  std::size_t valid_triplets = 0;
  double total = 0.0;

  for (std::size_t a = 0; a < n; ++a) {
    bool has_pos = false, has_neg = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      (labels[j] == labels[a] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    ++out.valid_anchors;

    if (mining == TripletMining::kBatchHard) {
      std::size_t hard_p = n, hard_n = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == a) continue;
        const double dist = 1.0 - cos[a * n + j];
        if (labels[j] == labels[a]) {
          if (hard_p == n || dist > 1.0 - cos[a * n + hard_p]) hard_p = j;
        } else if (hard_n == n || dist < 1.0 - cos[a * n + hard_n]) {
          hard_n = j;
        }
      }
      const double raw = cos[a * n + hard_n] - cos[a * n + hard_p] + margin;
      if (raw > 0.0) {
        total += raw;
        active.push_back({a, hard_p, hard_n});
      }
    } else {
      for (std::size_t p = 0; p < n; ++p) {
        if (p == a || labels[p] != labels[a]) continue;
        for (std::size_t q = 0; q < n; ++q) {
          if (labels[q] == labels[a]) continue;
          ++valid_triplets;
          const double raw = cos[a * n + q] - cos[a * n + p] + margin;
          if (raw > 0.0) {
            total += raw;
            active.push_back({a, p, q});
          }
        }
      }
    }
  }

  if (out.valid_anchors == 0) {
    out.no_valid_anchor = true;
    return out;
  }
  const double denom = mining == TripletMining::kBatchHard
                           ? static_cast<double>(out.valid_anchors)
                           : static_cast<double>(valid_triplets);
  out.loss = total / denom;
  for (const auto& t : active) {
    const auto term = triplet_loss(embeddings[t.a], embeddings[t.p], embeddings[t.n], margin);
    for (std::size_t k = 0; k < term.grad_anchor.size(); ++k) {
      out.grads[t.a][k] += term.grad_anchor[k] / denom;
      out.grads[t.p][k] += term.grad_positive[k] / denom;
      out.grads[t.n][k] += term.grad_negative[k] / denom;
    }
  }
  return out;
}

}  // namespace faqir
