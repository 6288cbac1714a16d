#pragma once

#include <optional>
#include <string>
#include <vector>

#include "altml/kernel.hpp"
#include "altml/loss.hpp"
#include "altml/types.hpp"

namespace altml {

enum class PaVariant { pa1, pa2 };

// Binary-relevance reduction with one Passive-Aggressive classifier per
// label. Linear models keep an L×d weight block; kernel models share one
// support list with a row of L coefficients per support vector.
class BRModel {
 public:
  BRModel() = default;
  BRModel(PaVariant variant, double c, std::size_t labels, std::size_t dim,
          std::optional<KernelDescriptor> kernel = std::nullopt);

  PaVariant variant() const noexcept { return variant_; }
  double aggressiveness() const noexcept { return c_; }
  std::size_t labels() const noexcept { return labels_; }
  std::size_t dim() const noexcept { return dim_; }
  bool is_kernel() const noexcept { return kernel_.has_value(); }
  const std::optional<KernelDescriptor>& kernel() const noexcept { return kernel_; }

  // Linear: weight vector of classifier l.
  std::span<double> weights(std::size_t l);
  std::span<const double> weights(std::size_t l) const;

  // Kernel: shared support list and per-support coefficient rows.
  const std::vector<SparseVector>& support() const noexcept { return support_; }
  std::span<const double> coef_row(std::size_t k) const;
  std::size_t support_size() const noexcept { return support_.size(); }

  // Rounds skipped because ‖x‖ = 0 while some label had positive loss.
  std::size_t skipped_zero_norm() const noexcept { return skipped_zero_norm_; }

  std::vector<double> scores(const SparseVector& x) const;

  friend bool operator==(const BRModel&, const BRModel&) = default;

 private:
  friend void br_round(BRModel& m, const Example& ex);
  friend class SnapshotAccess;

  PaVariant variant_ = PaVariant::pa1;
  double c_ = 1.0;
  std::size_t labels_ = 0;
  std::size_t dim_ = 0;
  std::optional<KernelDescriptor> kernel_;
  std::vector<double> weights_;  // linear, label-major
  std::vector<SparseVector> support_;
  std::vector<double> coefs_;  // kernel, L per support vector
  std::size_t skipped_zero_norm_ = 0;
};

std::string to_string(PaVariant v);

// Scores as a ScoreVector with a fixed zero threshold, so BR models share
// the ALT evaluation path.
ScoreVector br_score(const BRModel& m, const SparseVector& x);
// {l : score_l(x) > 0}.
LabelSet br_predict(const BRModel& m, const SparseVector& x);

// Per label l with y = ±1 and ℓ = [1 − y score_l]_+:
//   PA-I:  τ = min(C, ℓ/‖x‖²)     PA-II: τ = ℓ/(‖x‖² + 1/(2C))
//   w_l += τ y x.
// Kernel models use K(x, x) for ‖x‖² and append one support vector.
void br_round(BRModel& m, const Example& ex);

// Mean per-label hinge loss, the BR counterpart of the ALT loss.
double br_loss(const BRModel& m, const Example& ex);

}  // namespace altml
