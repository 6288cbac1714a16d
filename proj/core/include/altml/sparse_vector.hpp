#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace altml {

using FeatureIndex = std::uint32_t;

// Immutable sparse vector with sorted, strictly increasing indices and no
// stored zeros. The squared 2-norm is computed once at construction.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}

  // Indices must be strictly increasing and < dim. Zero values are dropped.
  SparseVector(std::size_t dim, std::vector<FeatureIndex> indices, std::vector<double> values);

  // Pairs in any order; duplicate indices throw.
  static SparseVector from_pairs(std::size_t dim,
                                 std::vector<std::pair<FeatureIndex, double>> pairs);
  static SparseVector from_dense(std::span<const double> dense);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::span<const FeatureIndex> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }
  double squared_norm() const noexcept { return squared_norm_; }

  // Value at coordinate j (0 when not stored).
  double at(FeatureIndex j) const;

  SparseVector scaled(double factor) const;
  std::vector<double> to_dense() const;

  friend bool operator==(const SparseVector& a, const SparseVector& b) {
    return a.dim_ == b.dim_ && a.indices_ == b.indices_ && a.values_ == b.values_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<FeatureIndex> indices_;
  std::vector<double> values_;
  double squared_norm_ = 0.0;
};

// Σ_j x[j]·col[j]. Throws DimensionError when x.dim() != col.size().
double sparse_dot(const SparseVector& x, std::span<const double> col);

// col += c·x, touching only x's support. Throws on dimension mismatch or
// non-finite c.
void scaled_add(std::span<double> col, double c, const SparseVector& x);

// ⟨a, b⟩ by merging the two index lists.
double sparse_sparse_dot(const SparseVector& a, const SparseVector& b);

}  // namespace altml
