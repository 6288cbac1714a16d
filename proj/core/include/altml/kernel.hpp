#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "altml/dataset.hpp"
#include "altml/linear_learners.hpp"
#include "altml/loss.hpp"

namespace altml {

enum class KernelKind { rbf, linear };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& s);

struct KernelDescriptor {
  KernelKind kind = KernelKind::rbf;
  double sigma2 = 1.0;  // RBF width: K(a,b) = exp(−‖a−b‖² / (2 sigma2))

  void validate() const;
  friend bool operator==(const KernelDescriptor&, const KernelDescriptor&) = default;
};

// rbf: exp(−(‖a‖² + ‖b‖² − 2⟨a,b⟩) / (2σ²)); linear: ⟨a,b⟩.
double kernel_eval(const KernelDescriptor& k, const SparseVector& a, const SparseVector& b);

// Dense kernel matrix over a fixed dataset, for training runs that revisit
// the same instances (cross-validation, multiple passes).
class GramMatrix {
 public:
  GramMatrix(const Dataset& ds, const KernelDescriptor& kernel);

  std::size_t size() const noexcept { return n_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Support-vector expansion w(i) = Σ_k alpha_k(i) φ(x_k) for the L label
// columns and the threshold column. Each support vector owns one row of
// L + 1 coefficients; rows are never all zero.
class KernelModel {
 public:
  KernelModel() = default;
  KernelModel(KernelDescriptor kernel, std::size_t labels, std::size_t dim);

  const KernelDescriptor& kernel() const noexcept { return kernel_; }
  std::size_t labels() const noexcept { return labels_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t row_width() const noexcept { return labels_ + 1; }
  std::size_t support_size() const noexcept { return support_.size(); }

  const std::vector<SparseVector>& support() const noexcept { return support_; }
  std::span<const double> alpha_row(std::size_t k) const;
  std::span<const double> alphas() const noexcept { return alphas_; }
  // Position of each support vector in the training dataset, or -1.
  const std::vector<std::int64_t>& support_ids() const noexcept { return support_ids_; }

  void add_support(SparseVector x, std::span<const double> alpha, std::int64_t source_id = -1);

  friend bool operator==(const KernelModel&, const KernelModel&) = default;

 private:
  KernelDescriptor kernel_;
  std::size_t labels_ = 0;
  std::size_t dim_ = 0;
  std::vector<SparseVector> support_;
  std::vector<double> alphas_;
  std::vector<std::int64_t> support_ids_;
};

// κ_k = K(x_k, x) for every support vector.
std::vector<double> kernel_row(const KernelModel& m, const SparseVector& x);
ScoreVector kscore_from_row(const KernelModel& m, std::span<const double> kappa);
ScoreVector kscore(const KernelModel& m, const SparseVector& x);

// Where kernel values come from during a training round.
struct KernelSource {
  const GramMatrix* gram = nullptr;
  std::int64_t example_id = -1;  // row of `gram` holding the current instance
};

// Kernelized first-order ALT round. Each sub-update rescoring includes the
// instance's own pending row through K(x, x); all sub-updates of one round
// are coalesced into a single alpha row with τ(i) = −η c(i).
RoundResult kfalt_round(KernelModel& m, const Example& ex, const FaltConfig& cfg,
                        KernelSource source = {});

}  // namespace altml
