#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "altml/metrics.hpp"
#include "../support/metrics_oracle.hpp"

using namespace altml;
namespace tf = altml::testing;

namespace {

EvalRecord rec(std::size_t L, std::vector<Label> y, std::vector<Label> yhat,
               std::vector<double> scores) {
  return {LabelSet(L, std::move(y)), LabelSet(L, std::move(yhat)), ScoreVector{std::move(scores), 0.0}};
}

}  // namespace

TEST_CASE("perfect predictions") {
  std::vector<EvalRecord> recs{rec(3, {0, 2}, {0, 2}, {1.0, -1.0, 0.5}),
                               rec(3, {1}, {1}, {-2.0, 3.0, 0.0})};
  const auto r = compute_metrics(recs);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.micro_f1 == 1.0);
  CHECK(r.hamming_loss == 0.0);
  CHECK(r.ranking_loss == 0.0);
  CHECK(r.n_examples == 2);
}

TEST_CASE("single-example hand fixture") {
  std::vector<EvalRecord> recs{rec(3, {0, 1}, {1, 2}, {0.1, 0.2, 0.3})};
  const auto r = compute_metrics(recs);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == 0.5);
  CHECK(r.f1 == 0.5);
  CHECK(r.hamming_loss == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("ranking ties count as errors") {
  std::vector<EvalRecord> recs{rec(2, {0}, {}, {0.3, 0.3})};
  CHECK(compute_metrics(recs).ranking_loss == 1.0);
}

TEST_CASE("empty-set conventions") {
  std::vector<EvalRecord> both_empty{rec(2, {}, {}, {0.0, 0.0})};
  auto r = compute_metrics(both_empty);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.macro_f1 == 0.0);
  CHECK(r.micro_f1 == 0.0);
  CHECK(r.rl_skipped == 1);
  CHECK(r.ranking_loss == 0.0);

  std::vector<EvalRecord> missed{rec(2, {1}, {}, {0.0, 0.0})};
  r = compute_metrics(missed);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);

  std::vector<EvalRecord> spurious{rec(2, {}, {0}, {0.0, 0.0})};
  r = compute_metrics(spurious);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);

  std::vector<EvalRecord> full{rec(2, {0, 1}, {0, 1}, {1.0, 1.0})};
  CHECK(compute_metrics(full).rl_skipped == 1);
}

TEST_CASE("errors") {
  std::vector<EvalRecord> none;
  CHECK_THROWS(compute_metrics(none));
  std::vector<EvalRecord> mixed{rec(2, {0}, {0}, {1, 0}), rec(3, {0}, {0}, {1, 0, 0})};
  CHECK_THROWS(compute_metrics(mixed));
}

TEST_CASE("agreement with the brute-force oracle") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 100; ++t) {
    const std::size_t L = tf::uniform(rng, 1, 9);
    const auto recs = tf::random_records(rng, 50, L);
    const auto r = compute_metrics(recs);
    const auto o = tf::oracle_metrics(recs);
    CHECK(std::abs(r.precision - o.precision) <= 1e-12);
    CHECK(std::abs(r.recall - o.recall) <= 1e-12);
    CHECK(std::abs(r.f1 - o.f1) <= 1e-12);
    CHECK(std::abs(r.macro_f1 - o.macro_f1) <= 1e-12);
    CHECK(std::abs(r.micro_f1 - o.micro_f1) <= 1e-12);
    CHECK(std::abs(r.hamming_loss - o.hamming) <= 1e-12);
    CHECK(std::abs(r.ranking_loss - o.ranking) <= 1e-12);
    CHECK(r.rl_skipped == o.rl_skipped);
    for (double v : r.values()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("micro f1 matches the confusion counts") {
  std::mt19937_64 rng(103);
  const auto recs = tf::random_records(rng, 50, 6);
  const auto r = compute_metrics(recs);
  double tp = 0, den = 0;
  for (const auto& c : r.per_label_confusion) {
    tp += static_cast<double>(c.tp);
    den += static_cast<double>(2 * c.tp + c.fp + c.fn);
  }
  CHECK(r.micro_f1 == doctest::Approx(2 * tp / den).epsilon(1e-15));
}

TEST_CASE("report is invariant to record order") {
  std::mt19937_64 rng(107);
  auto recs = tf::random_records(rng, 50, 5);
  const auto a = compute_metrics(recs);
  std::shuffle(recs.begin(), recs.end(), rng);
  const auto b = compute_metrics(recs);
  for (std::size_t m = 0; m < MetricsReport::kMetricCount; ++m) {
    CHECK(a.values()[m] == doctest::Approx(b.values()[m]).epsilon(1e-12));
  }
  CHECK(a.per_label_confusion == b.per_label_confusion);
}

TEST_CASE("ranking loss is invariant to monotone score transforms") {
  std::mt19937_64 rng(109);
  auto recs = tf::random_records(rng, 50, 5);
  const double before = compute_metrics(recs).ranking_loss;
  for (auto& r : recs) {
    for (auto& s : r.scores.label_scores) s = std::exp(3.0 * s) - 7.0;
  }
  CHECK(compute_metrics(recs).ranking_loss == before);
}

TEST_CASE("hamming loss is zero only for exact predictions") {
  std::mt19937_64 rng(113);
  auto recs = tf::random_records(rng, 20, 4);
  for (auto& r : recs) r.predicted = r.truth;
  CHECK(compute_metrics(recs).hamming_loss == 0.0);
  recs[5].predicted = LabelSet(4, {0, 1, 2, 3}) == recs[5].truth ? LabelSet(4) : LabelSet(4, {0, 1, 2, 3});
  CHECK(compute_metrics(recs).hamming_loss > 0.0);
}

TEST_CASE("comparison and averaging") {
  MetricsReport a, b;
  a.precision = a.recall = a.f1 = a.macro_f1 = a.micro_f1 = 0.8;
  a.hamming_loss = a.ranking_loss = 0.1;
  b.precision = b.recall = b.f1 = b.macro_f1 = b.micro_f1 = 0.7;
  b.hamming_loss = b.ranking_loss = 0.2;
  const auto c = compare_reports(a, b);
  CHECK(c.better == 7);
  CHECK(c.worse == 0);
  const std::vector<MetricsReport> both{a, b};
  const auto avg = average_reports(both);
  CHECK(avg.f1 == doctest::Approx(0.75));
  CHECK(avg.hamming_loss == doctest::Approx(0.15));
}

TEST_CASE("json uses six decimals") {
  std::vector<EvalRecord> recs{rec(3, {0, 1}, {1, 2}, {0.1, 0.2, 0.3})};
  const auto j = to_json(compute_metrics(recs));
  CHECK(j.find("\"hamming_loss\":0.666667") != std::string::npos);
  CHECK(j.find("\"precision\":0.500000") != std::string::npos);
  CHECK(j.find("\"rl_skipped\":0") != std::string::npos);
}
