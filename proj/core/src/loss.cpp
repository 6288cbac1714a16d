#include "altml/loss.hpp"

#include <algorithm>
#include <string>

#include "altml/errors.hpp"

namespace altml {
namespace {

void check_labels(const ScoreVector& s, const LabelSet& y) {
  if (s.labels() != y.total_labels()) {
    throw DimensionError("score vector has " + std::to_string(s.labels()) +
                         " labels, label set has " + std::to_string(y.total_labels()));
  }
}

}  // namespace

double StructuredGradient::squared_norm() const {
  double c2 = 0.0;
  for (double c : coeffs) c2 += c * c;
  return x ? c2 * x->squared_norm() : 0.0;
}

ScoreVector score(const WeightMatrix& w, const SparseVector& x) {
  if (x.dim() != w.dim()) {
    throw DimensionError("score: instance dim " + std::to_string(x.dim()) + " != model dim " +
                         std::to_string(w.dim()));
  }
  ScoreVector s;
  s.label_scores.resize(w.labels());
  for (std::size_t i = 0; i < w.labels(); ++i) s.label_scores[i] = sparse_dot(x, w.column(i));
  s.threshold_score = sparse_dot(x, w.threshold_column());
  return s;
}

LabelSet predict_from_scores(const ScoreVector& s) {
  std::vector<Label> out;
  for (std::size_t i = 0; i < s.labels(); ++i) {
    if (s.label_scores[i] > s.threshold_score) out.push_back(static_cast<Label>(i));
  }
  return LabelSet(s.labels(), std::move(out));
}

LabelSet predict(const WeightMatrix& w, const SparseVector& x) {
  return predict_from_scores(score(w, x));
}

LossTerms loss_terms(const ScoreVector& s, const LabelSet& y) {
  check_labels(s, y);
  const std::size_t n_labels = s.labels();
  const std::size_t n_rel = y.size();
  const std::size_t n_irr = y.complement_size();
  const auto mask = y.mask();

  LossTerms t;
  t.coeffs.assign(n_labels + 1, 0.0);
  t.flags.a.assign(n_labels, 0);
  t.flags.b.assign(n_labels, 0);

  double rel_hinge = 0.0;
  double irr_hinge = 0.0;
  for (std::size_t i = 0; i < n_labels; ++i) {
    if (mask[i]) {
      const double margin = s.label_scores[i] - s.threshold_score;
      if (margin < 1.0) {
        t.flags.a[i] = 1;
        ++t.flags.a_sum;
        rel_hinge += 1.0 - margin;
      }
    } else {
      const double margin = s.threshold_score - s.label_scores[i];
      if (margin < 1.0) {
        t.flags.b[i] = 1;
        ++t.flags.b_sum;
        irr_hinge += 1.0 - margin;
      }
    }
  }

  const double inv_rel = n_rel > 0 ? 1.0 / static_cast<double>(n_rel) : 0.0;
  const double inv_irr = n_irr > 0 ? 1.0 / static_cast<double>(n_irr) : 0.0;
  for (std::size_t i = 0; i < n_labels; ++i) {
    if (t.flags.a[i]) t.coeffs[i] = -inv_rel;
    if (t.flags.b[i]) t.coeffs[i] = inv_irr;
  }
  t.coeffs[n_labels] = static_cast<double>(t.flags.a_sum) * inv_rel -
                       static_cast<double>(t.flags.b_sum) * inv_irr;
  t.loss = rel_hinge * inv_rel + irr_hinge * inv_irr;
  return t;
}

double loss_from_scores(const ScoreVector& s, const LabelSet& y) { return loss_terms(s, y).loss; }

double loss_eval(const WeightMatrix& w, const Example& ex) {
  return loss_from_scores(score(w, ex.x), ex.y);
}

GradientResult subgradient(const WeightMatrix& w, const Example& ex) {
  if (ex.y.total_labels() != w.labels()) {
    throw DimensionError("subgradient: label count mismatch");
  }
  LossTerms t = loss_terms(score(w, ex.x), ex.y);
  GradientResult r;
  r.gradient.coeffs = std::move(t.coeffs);
  r.gradient.x = &ex.x;
  r.flags = std::move(t.flags);
  r.loss = t.loss;
  return r;
}

}  // namespace altml
