// SPDX-License-Identifier: Apache-2.0
#pragma once

// Intent-level retrieval and intent-detection metrics. Every query has at
// most one relevant intent; queries without a gold intent are out-of-scope.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faqir/retrieval.hpp"
#include "json.hpp"

namespace faqir {

struct RankedPrediction {
  std::string query_id;
  std::vector<IntentScore> ranked;  // scores non-increasing
  std::optional<std::string> gold;  // nullopt marks an out-of-scope query

  // -infinity for an empty ranking.
  double top_score() const;
  // 1-based rank of the gold intent, if present in the ranking.
  std::optional<std::size_t> gold_rank() const;
};

// These four require a non-empty set where every prediction has a gold
// intent; both violations throw kInvalidArgument.
double success_rate_at_k(std::span<const RankedPrediction> preds, std::size_t k);
double mrr_at_k(std::span<const RankedPrediction> preds, std::size_t k);
double ndcg_at_k(std::span<const RankedPrediction> preds, std::size_t k);
double map_at_k(std::span<const RankedPrediction> preds, std::size_t k);

// Intent-detection accuracy with a confidence threshold: an in-scope query is
// correct when its gold intent is ranked first with top score >= threshold;
// an out-of-scope query is correct when the top score is below threshold.
double top1_accuracy(std::span<const RankedPrediction> preds, double threshold);

struct SweepPoint {
  double threshold = 0.0;
  std::optional<double> oos_recall;         // omitted without OOS queries
  std::optional<double> in_scope_accuracy;  // omitted without in-scope queries
};

// Thresholds must be strictly increasing. A sub-threshold correct answer
// counts as an in-scope miss.
std::vector<SweepPoint> oos_sweep(std::span<const RankedPrediction> preds,
                                  std::span<const double> thresholds);

// count evenly spaced thresholds from lo to hi inclusive.
std::vector<double> threshold_grid(double lo, double hi, std::size_t count);

struct EvalReport {
  std::string method;
  std::string dataset;
  std::size_t k = 3;
  double threshold = 0.1;
  std::size_t queries = 0;
  std::size_t in_scope_queries = 0;
  std::size_t oos_queries = 0;
  // Over in-scope queries; all in [0, 1].
  double success_rate = 0.0;
  double mrr = 0.0;
  double ndcg = 0.0;
  double map = 0.0;
  // Over all queries, thresholded.
  double top1_accuracy = 0.0;
  std::vector<SweepPoint> threshold_sweep;
};

EvalReport evaluate(std::span<const RankedPrediction> preds, std::size_t k, double threshold,
                    std::span<const double> sweep_thresholds);

nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);

enum class ReportFormat { kJson, kCsv };

// Header "threshold,oos_recall,in_scope_accuracy", values in %.6f, omitted
// values as empty fields.
std::string sweep_csv(std::span<const SweepPoint> sweep);
// Deterministic bytes for a fixed report. Throws kIo on an unwritable path.
void emit_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format);

}  // namespace faqir
