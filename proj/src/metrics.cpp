// SPDX-License-Identifier: Apache-2.0
#include "faqir/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "faqir/error.hpp"

namespace faqir {

double RankedPrediction::top_score() const {
  return ranked.empty() ? -std::numeric_limits<double>::infinity() : ranked.front().score;
}

std::optional<std::size_t> RankedPrediction::gold_rank() const {
  if (!gold) return std::nullopt;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].intent == *gold) return i + 1;
  }
  return std::nullopt;
}

namespace {

void require_gold(std::span<const RankedPrediction> preds, std::size_t k) {
  if (preds.empty()) fail(ErrorCode::kInvalidArgument, "empty prediction set");
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  for (const auto& p : preds) {
    if (!p.gold) fail(ErrorCode::kInvalidArgument, "prediction '" + p.query_id + "' has no gold intent");
  }
}

template <typename Gain>
double mean_gain(std::span<const RankedPrediction> preds, std::size_t k, Gain gain) {
  require_gold(preds, k);
  double total = 0.0;
  for (const auto& p : preds) {
    const auto r = p.gold_rank();
    if (r && *r <= k) total += gain(*r);
  }
  return total / static_cast<double>(preds.size());
}

}  // namespace

double success_rate_at_k(std::span<const RankedPrediction> preds, std::size_t k) {
  return mean_gain(preds, k, [](std::size_t) { return 1.0; });
}

double mrr_at_k(std::span<const RankedPrediction> preds, std::size_t k) {
  return mean_gain(preds, k, [](std::size_t r) { return 1.0 / static_cast<double>(r); });
}

double ndcg_at_k(std::span<const RankedPrediction> preds, std::size_t k) {
  return mean_gain(preds, k, [](std::size_t r) { return 1.0 / std::log2(1.0 + static_cast<double>(r)); });
}

double map_at_k(std::span<const RankedPrediction> preds, std::size_t k) {
  // Precision at the single relevant position, divided by min(1, k) = 1.
  return mean_gain(preds, k, [](std::size_t r) {
    const double hits = 1.0;
    return hits / static_cast<double>(r);
  });
}

double top1_accuracy(std::span<const RankedPrediction> preds, double threshold) {
  if (preds.empty()) fail(ErrorCode::kInvalidArgument, "empty prediction set");
  std::size_t correct = 0;
  for (const auto& p : preds) {
    const bool confident = p.top_score() >= threshold;
    if (p.gold) {
      correct += confident && p.ranked.front().intent == *p.gold;
    } else {
      correct += !confident;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

std::vector<SweepPoint> oos_sweep(std::span<const RankedPrediction> preds,
                                  std::span<const double> thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      fail(ErrorCode::kInvalidArgument, "sweep thresholds must be strictly increasing");
    }
  }
  std::size_t oos = 0, in_scope = 0;
  for (const auto& p : preds) (p.gold ? in_scope : oos) += 1;

  std::vector<SweepPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    std::size_t rejected = 0, accepted = 0;
    for (const auto& p : preds) {
      const bool confident = p.top_score() >= t;
      if (!p.gold) {
        rejected += !confident;
      } else if (confident && p.ranked.front().intent == *p.gold) {
        ++accepted;
      }
    }
    SweepPoint pt{t, std::nullopt, std::nullopt};
    if (oos > 0) pt.oos_recall = static_cast<double>(rejected) / static_cast<double>(oos);
    if (in_scope > 0) pt.in_scope_accuracy = static_cast<double>(accepted) / static_cast<double>(in_scope);
    out.push_back(pt);
  }
  return out;
}

std::vector<double> threshold_grid(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  if (!(hi > lo)) fail(ErrorCode::kInvalidArgument, "threshold grid needs hi > lo");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

EvalReport evaluate(std::span<const RankedPrediction> preds, std::size_t k, double threshold,
                    std::span<const double> sweep_thresholds) {
  if (preds.empty()) fail(ErrorCode::kInvalidArgument, "empty prediction set");
  EvalReport r;
  r.k = k;
  r.threshold = threshold;
  r.queries = preds.size();
  std::vector<RankedPrediction> in_scope;
  for (const auto& p : preds) {
    if (p.gold) in_scope.push_back(p);
  }
  r.in_scope_queries = in_scope.size();
  r.oos_queries = preds.size() - in_scope.size();
  if (!in_scope.empty()) {
    r.success_rate = success_rate_at_k(in_scope, k);
    r.mrr = mrr_at_k(in_scope, k);
    r.ndcg = ndcg_at_k(in_scope, k);
    r.map = map_at_k(in_scope, k);
  }
  r.top1_accuracy = top1_accuracy(preds, threshold);
  r.threshold_sweep = oos_sweep(preds, sweep_thresholds);
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  auto sweep = nlohmann::json::array();
  for (const auto& p : r.threshold_sweep) {
    nlohmann::json row{{"threshold", p.threshold}};
    row["oos_recall"] = p.oos_recall ? nlohmann::json(*p.oos_recall) : nlohmann::json(nullptr);
    row["in_scope_accuracy"] =
        p.in_scope_accuracy ? nlohmann::json(*p.in_scope_accuracy) : nlohmann::json(nullptr);
    sweep.push_back(std::move(row));
  }
  return {{"method", r.method},
          {"dataset", r.dataset},
          {"k", r.k},
          {"threshold", r.threshold},
          {"queries", r.queries},
          {"in_scope_queries", r.in_scope_queries},
          {"oos_queries", r.oos_queries},
          {"success_rate", r.success_rate},
          {"mrr", r.mrr},
          {"ndcg", r.ndcg},
          {"map", r.map},
          {"top1_accuracy", r.top1_accuracy},
          {"threshold_sweep", sweep}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.method = j.at("method").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.threshold = j.at("threshold").get<double>();
    r.queries = j.at("queries").get<std::size_t>();
    r.in_scope_queries = j.at("in_scope_queries").get<std::size_t>();
    r.oos_queries = j.at("oos_queries").get<std::size_t>();
    r.success_rate = j.at("success_rate").get<double>();
    r.mrr = j.at("mrr").get<double>();
    r.ndcg = j.at("ndcg").get<double>();
    r.map = j.at("map").get<double>();
    r.top1_accuracy = j.at("top1_accuracy").get<double>();
    for (const auto& row : j.at("threshold_sweep")) {
      SweepPoint p{row.at("threshold").get<double>(), std::nullopt, std::nullopt};
      if (!row.at("oos_recall").is_null()) p.oos_recall = row.at("oos_recall").get<double>();
      if (!row.at("in_scope_accuracy").is_null()) {
        p.in_scope_accuracy = row.at("in_scope_accuracy").get<double>();
      }
      r.threshold_sweep.push_back(p);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("eval report: ") + e.what());
  }
}

std::string sweep_csv(std::span<const SweepPoint> sweep) {
  std::string out = "threshold,oos_recall,in_scope_accuracy\n";
  char buf[64];
  auto field = [&](const std::optional<double>& v) {
    if (v) {
      std::snprintf(buf, sizeof buf, "%.6f", *v);
      out += buf;
    }
  };
  for (const auto& p : sweep) {
    std::snprintf(buf, sizeof buf, "%.6f", p.threshold);
    out += buf;
    out += ',';
    field(p.oos_recall);
    out += ',';
    field(p.in_scope_accuracy);
    out += '\n';
  }
  return out;
}

void emit_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write report to " + path.string());
  if (format == ReportFormat::kJson) {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << sweep_csv(report.threshold_sweep);
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace faqir
