#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "altml/loss.hpp"
#include "altml/types.hpp"

namespace altml {

struct EvalRecord {
  LabelSet truth;
  LabelSet predicted;
  ScoreVector scores;  // label_scores drive the ranking loss
};

struct LabelConfusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  friend bool operator==(const LabelConfusion&, const LabelConfusion&) = default;
};

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double hamming_loss = 0.0;
  double ranking_loss = 0.0;
  std::size_t n_examples = 0;
  std::vector<LabelConfusion> per_label_confusion;
  // Examples with Y = ∅ or Y = all labels have no (relevant, irrelevant)
  // pair and are left out of the ranking loss.
  std::size_t rl_skipped = 0;

  static constexpr std::size_t kMetricCount = 7;
  static const std::array<const char*, kMetricCount>& metric_names();
  // Values in metric_names() order.
  std::array<double, kMetricCount> values() const;
  // True for the metrics where smaller is better (Hamming and ranking loss).
  static bool lower_is_better(std::size_t metric);
};

// Example-based precision/recall/F1, label-based macro/micro F1, Hamming
// loss and ranking loss. Empty-set conventions:
//   precision term with Ŷ = ∅ is 1 if Y = ∅ else 0,
//   recall term with Y = ∅ is 1 if Ŷ = ∅ else 0,
//   macro F1 for a label with 2tp + fp + fn = 0 is 0,
//   F1 is the harmonic mean of the averaged precision and recall.
// Ranking-loss ties count as errors.
MetricsReport compute_metrics(std::span<const EvalRecord> records);

// Element-wise mean of per-fold reports (confusion counts are summed).
MetricsReport average_reports(std::span<const MetricsReport> reports);

// Number of metrics on which `a` beats `b` and on which it loses.
struct MetricComparison {
  int better = 0;
  int worse = 0;
};
MetricComparison compare_reports(const MetricsReport& a, const MetricsReport& b);

// One JSON object: the seven metrics to 6 decimals, n_examples, rl_skipped.
std::string to_json(const MetricsReport& r);

}  // namespace altml
