#pragma once

#include <cstdint>
#include <vector>

#include "altml/types.hpp"

namespace altml {

// Per-label scores x·w(i) and the threshold score x·w(L+1).
struct ScoreVector {
  std::vector<double> label_scores;
  double threshold_score = 0.0;

  std::size_t labels() const noexcept { return label_scores.size(); }
};

// Hinge violation indicators. a[i] is meaningful only for relevant labels,
// b[i] only for irrelevant ones; the other entry is always 0.
struct ViolationFlags {
  std::vector<std::uint8_t> a;
  std::vector<std::uint8_t> b;
  std::size_t a_sum = 0;
  std::size_t b_sum = 0;
};

// ∇(i) = coeffs[i] · x for i in [0, L]; coeffs[L] belongs to the threshold
// column. Holds a pointer to the round's instance, so it must not outlive it.
struct StructuredGradient {
  std::vector<double> coeffs;
  const SparseVector* x = nullptr;

  // Σ_i ‖∇(i)‖² = ‖x‖² · Σ_i coeffs[i]².
  double squared_norm() const;
};

// Coefficients, flags and loss derived from a score vector alone. Shared by
// the linear learners and the kernel learner.
struct LossTerms {
  std::vector<double> coeffs;  // L + 1 entries
  ViolationFlags flags;
  double loss = 0.0;
};

struct GradientResult {
  StructuredGradient gradient;
  ViolationFlags flags;
  double loss = 0.0;
};

ScoreVector score(const WeightMatrix& w, const SparseVector& x);

// {i : label_scores[i] > threshold_score}; ties are irrelevant.
LabelSet predict_from_scores(const ScoreVector& s);
LabelSet predict(const WeightMatrix& w, const SparseVector& x);

// The ALT loss
//   (1/|Y|) Σ_{i∈Y} [1 − (s_i − s_thr)]_+  +  (1/|Ȳ|) Σ_{i∈Ȳ} [1 − (s_thr − s_i)]_+
// with a term dropped when its set is empty.
double loss_from_scores(const ScoreVector& s, const LabelSet& y);
double loss_eval(const WeightMatrix& w, const Example& ex);

// Subgradient coefficients: −a(i)/|Y| on relevant labels, b(i)/|Ȳ| on
// irrelevant ones and a/|Y| − b/|Ȳ| on the threshold. A hinge exactly at
// margin 1 counts as inactive.
LossTerms loss_terms(const ScoreVector& s, const LabelSet& y);
GradientResult subgradient(const WeightMatrix& w, const Example& ex);

}  // namespace altml
