// SPDX-License-Identifier: Apache-2.0
#pragma once

// Metric-learning losses on cosine geometry. Inputs are raw (not necessarily
// normalized) vectors; each loss normalizes internally and returns gradients
// with respect to the raw inputs. Everything is evaluated in double.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace faqir {

struct PairLoss {
  double loss = 0.0;
  std::vector<double> grad_a;
  std::vector<double> grad_b;
};

struct TripletLoss {
  double loss = 0.0;
  std::vector<double> grad_anchor;
  std::vector<double> grad_positive;
  std::vector<double> grad_negative;
};

struct BatchLoss {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;  // one per batch row
  std::size_t valid_anchors = 0;
  bool no_valid_anchor = false;
};

enum class TripletMining { kBatchHard, kBatchAll };

// d = 1 - cos(a, b); loss = label * d^2 + (1 - label) * max(0, margin - d)^2.
PairLoss contrastive_loss(std::span<const double> a, std::span<const double> b, int label,
                          double margin);

// loss = max(0, (1 - cos(a,p)) - (1 - cos(a,n)) + margin).
TripletLoss triplet_loss(std::span<const double> anchor, std::span<const double> positive,
                         std::span<const double> negative, double margin);

// In-batch mining over rows with intent labels. An anchor is valid when the
// batch holds another row with its label and one with a different label.
// Batch-hard: hardest positive and hardest negative per anchor, mean over
// valid anchors. Batch-all: mean over every valid (a, p, n).
BatchLoss online_triplet_batch(std::span<const std::vector<double>> embeddings,
                               std::span<const std::uint32_t> labels, double margin,
                               TripletMining mining = TripletMining::kBatchHard);

}  // namespace faqir
