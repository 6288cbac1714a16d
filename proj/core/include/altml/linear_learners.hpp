#pragma once

#include <vector>

#include "altml/loss.hpp"
#include "altml/types.hpp"

namespace altml {

struct FaltConfig {
  double eta = 1.0;   // step size
  int max_learn = 1;  // M: sub-updates allowed per example

  void validate() const;
};

struct RoundResult {
  int rounds_used = 0;       // sub-updates actually applied
  double loss_before = 0.0;  // loss of the model on entry
};

// One online round of first-order ALT. Repeats
//   g ← subgradient(W, ex); stop if loss = 0; w(i) ← w(i) − η c(i) x
// at most cfg.max_learn times. Only coordinates in support(x) change.
RoundResult falt_round(WeightMatrix& w, const Example& ex, const FaltConfig& cfg);

// Diagonal second-order state: sq_sum holds, per column i and coordinate j,
// the running Σ_t (∇_t(i)[j])², so sqrt(sq_sum) is the row norm of the
// stacked gradient history.
class SaltState {
 public:
  SaltState() = default;
  SaltState(std::size_t labels, std::size_t dim, double eta, double delta, int max_learn);

  std::size_t labels() const noexcept { return labels_; }
  std::size_t dim() const noexcept { return dim_; }
  double eta() const noexcept { return eta_; }
  double delta() const noexcept { return delta_; }
  int max_learn() const noexcept { return max_learn_; }

  std::span<double> sq_sum(std::size_t column);
  std::span<const double> sq_sum(std::size_t column) const;
  std::span<double> sq_sum_data() noexcept { return sq_sum_; }
  std::span<const double> sq_sum_data() const noexcept { return sq_sum_; }

  // Σ_i Σ_j sqrt(sq_sum), the gradient-history term of the SALT regret bound.
  double history_norm_sum() const;

  friend bool operator==(const SaltState&, const SaltState&) = default;

 private:
  std::size_t labels_ = 0;
  std::size_t dim_ = 0;
  double eta_ = 1.0;
  double delta_ = 1.0;
  int max_learn_ = 1;
  std::vector<double> sq_sum_;
};

// One online round of second-order ALT. Per sub-update, for every column
// with a nonzero coefficient and every j in support(x):
//   sq_sum(i)[j] += (c(i) x[j])²
//   w(i)[j]      −= η c(i) x[j] / (δ + sqrt(sq_sum(i)[j]))
RoundResult salt_round(WeightMatrix& w, SaltState& state, const Example& ex);

// M = max(1, round(multiplier · L)).
int repeat_count(double multiplier, std::size_t labels);

}  // namespace altml
