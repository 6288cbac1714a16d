#include "altml/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "altml/errors.hpp"

namespace altml {
const std::array<const char*, MetricsReport::kMetricCount>& MetricsReport::metric_names() {
  static const std::array<const char*, kMetricCount> names = {
      "precision", "recall", "f1", "macro_f1", "micro_f1", "hamming_loss", "ranking_loss"};
  return names;
}

std::array<double, MetricsReport::kMetricCount> MetricsReport::values() const {
  return {precision, recall, f1, macro_f1, micro_f1, hamming_loss, ranking_loss};
}

bool MetricsReport::lower_is_better(std::size_t metric) { return metric >= 5; }

MetricsReport compute_metrics(std::span<const EvalRecord> records) {
  if (records.empty()) throw std::invalid_argument("compute_metrics: no records");
  const std::size_t n_labels = records.front().truth.total_labels();

  MetricsReport r;
  r.n_examples = records.size();
  r.per_label_confusion.assign(n_labels, {});

  double psn_sum = 0.0;
  double rcal_sum = 0.0;
  double rl_sum = 0.0;
  std::size_t rl_count = 0;
  std::size_t sym_diff = 0;

  for (const auto& rec : records) {
    if (rec.truth.total_labels() != n_labels || rec.predicted.total_labels() != n_labels ||
        rec.scores.labels() != n_labels) {
      throw DimensionError("compute_metrics: inconsistent label count");
    }
    const auto truth = rec.truth.mask();
    const auto pred = rec.predicted.mask();
    std::size_t inter = 0;
    for (std::size_t j = 0; j < n_labels; ++j) {
      auto& c = r.per_label_confusion[j];
      if (truth[j] && pred[j]) {
        ++inter;
        ++c.tp;
      } else if (pred[j]) {
        ++c.fp;
        ++sym_diff;
      } else if (truth[j]) {
        ++c.fn;
        ++sym_diff;
      }
    }
    const std::size_t n_true = rec.truth.size();
    const std::size_t n_pred = rec.predicted.size();
    psn_sum += n_pred > 0 ? static_cast<double>(inter) / static_cast<double>(n_pred)
                          : (n_true == 0 ? 1.0 : 0.0);
    rcal_sum += n_true > 0 ? static_cast<double>(inter) / static_cast<double>(n_true)
                           : (n_pred == 0 ? 1.0 : 0.0);

    if (n_true == 0 || n_true == n_labels) {
      ++r.rl_skipped;
      continue;
    }
    // Count misordered pairs by sorting irrelevant scores and binary
    // searching each relevant score: pairs with h(j) <= h(k).
    std::vector<double> irrelevant;
    irrelevant.reserve(n_labels - n_true);
    for (std::size_t k = 0; k < n_labels; ++k) {
      if (!truth[k]) irrelevant.push_back(rec.scores.label_scores[k]);
    }
    std::sort(irrelevant.begin(), irrelevant.end());
    std::size_t bad = 0;
    for (std::size_t j = 0; j < n_labels; ++j) {
      if (!truth[j]) continue;
      const double hj = rec.scores.label_scores[j];
      auto it = std::lower_bound(irrelevant.begin(), irrelevant.end(), hj);
      bad += static_cast<std::size_t>(irrelevant.end() - it);
    }
    rl_sum += static_cast<double>(bad) / static_cast<double>(n_true * (n_labels - n_true));
    ++rl_count;
  }

  const double n = static_cast<double>(records.size());
  r.precision = psn_sum / n;
  r.recall = rcal_sum / n;
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  double macro = 0.0;
  std::size_t tp = 0, denom = 0;
  for (const auto& c : r.per_label_confusion) {
    const std::size_t d = 2 * c.tp + c.fp + c.fn;
    macro += d > 0 ? 2.0 * static_cast<double>(c.tp) / static_cast<double>(d) : 0.0;
    tp += c.tp;
    denom += d;
  }
  r.macro_f1 = macro / static_cast<double>(n_labels);
  r.micro_f1 = denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
  r.hamming_loss = static_cast<double>(sym_diff) / (n * static_cast<double>(n_labels));
  r.ranking_loss = rl_count > 0 ? rl_sum / static_cast<double>(rl_count) : 0.0;
  return r;
}

MetricsReport average_reports(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw std::invalid_argument("average_reports: no reports");
  MetricsReport out;
  out.per_label_confusion.assign(reports.front().per_label_confusion.size(), {});
  for (const auto& r : reports) {
    out.precision += r.precision;
    out.recall += r.recall;
    out.f1 += r.f1;
    out.macro_f1 += r.macro_f1;
    out.micro_f1 += r.micro_f1;
    out.hamming_loss += r.hamming_loss;
    out.ranking_loss += r.ranking_loss;
    out.n_examples += r.n_examples;
    out.rl_skipped += r.rl_skipped;
    for (std::size_t j = 0; j < out.per_label_confusion.size(); ++j) {
      out.per_label_confusion[j].tp += r.per_label_confusion[j].tp;
      out.per_label_confusion[j].fp += r.per_label_confusion[j].fp;
      out.per_label_confusion[j].fn += r.per_label_confusion[j].fn;
    }
  }
  const double k = static_cast<double>(reports.size());
  out.precision /= k;
  out.recall /= k;
  out.f1 /= k;
  out.macro_f1 /= k;
  out.micro_f1 /= k;
  out.hamming_loss /= k;
  out.ranking_loss /= k;
  return out;
}

MetricComparison compare_reports(const MetricsReport& a, const MetricsReport& b) {
  const auto va = a.values();
  const auto vb = b.values();
  MetricComparison c;
  for (std::size_t m = 0; m < va.size(); ++m) {
    const bool a_wins = MetricsReport::lower_is_better(m) ? va[m] < vb[m] : va[m] > vb[m];
    const bool b_wins = MetricsReport::lower_is_better(m) ? vb[m] < va[m] : vb[m] > va[m];
    c.better += a_wins ? 1 : 0;
    c.worse += b_wins ? 1 : 0;
  }
  return c;
}

std::string to_json(const MetricsReport& r) {
  const auto names = MetricsReport::metric_names();
  const auto vals = r.values();
  std::string out = "{";
  char buf[64];
  for (std::size_t m = 0; m < vals.size(); ++m) {
    std::snprintf(buf, sizeof buf, "\"%s\":%.6f,", names[m], vals[m]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\"n_examples\":%zu,\"rl_skipped\":%zu}", r.n_examples,
                r.rl_skipped);
  out += buf;
  return out;
}

}  // namespace altml
