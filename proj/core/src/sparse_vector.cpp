#include "altml/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "altml/errors.hpp"

namespace altml {

SparseVector::SparseVector(std::size_t dim, std::vector<FeatureIndex> indices,
                           std::vector<double> values)
    : dim_(dim) {
  if (indices.size() != values.size()) {
    throw std::invalid_argument("SparseVector: index/value length mismatch");
  }
  indices_.reserve(indices.size());
  values_.reserve(values.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= dim) {
      throw DimensionError("SparseVector: index " + std::to_string(indices[k]) +
                           " out of range for dim " + std::to_string(dim));
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw std::invalid_argument("SparseVector: indices must be strictly increasing");
    }
    if (!std::isfinite(values[k])) {
      throw std::invalid_argument("SparseVector: non-finite value");
    }
    if (values[k] == 0.0) continue;
    indices_.push_back(indices[k]);
    values_.push_back(values[k]);
    squared_norm_ += values[k] * values[k];
  }
}

SparseVector SparseVector::from_pairs(std::size_t dim,
                                      std::vector<std::pair<FeatureIndex, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<FeatureIndex> idx;
  std::vector<double> val;
  idx.reserve(pairs.size());
  val.reserve(pairs.size());
  for (const auto& [j, v] : pairs) {
    if (!idx.empty() && idx.back() == j) {
      throw std::invalid_argument("SparseVector: duplicate index " + std::to_string(j));
    }
    idx.push_back(j);
    val.push_back(v);
  }
  return SparseVector(dim, std::move(idx), std::move(val));
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  std::vector<FeatureIndex> idx;
  std::vector<double> val;
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (dense[j] != 0.0) {
      idx.push_back(static_cast<FeatureIndex>(j));
      val.push_back(dense[j]);
    }
  }
  return SparseVector(dense.size(), std::move(idx), std::move(val));
}

double SparseVector::at(FeatureIndex j) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), j);
  if (it == indices_.end() || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - indices_.begin())];
}

SparseVector SparseVector::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& e : v) e *= factor;
  return SparseVector(dim_, indices_, std::move(v));
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t k = 0; k < indices_.size(); ++k) out[indices_[k]] = values_[k];
  return out;
}

double sparse_dot(const SparseVector& x, std::span<const double> col) {
  if (x.dim() != col.size()) {
    throw DimensionError("sparse_dot: vector dim " + std::to_string(x.dim()) +
                         " != column length " + std::to_string(col.size()));
  }
  const auto idx = x.indices();
  const auto val = x.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) sum += val[k] * col[idx[k]];
  return sum;
}

void scaled_add(std::span<double> col, double c, const SparseVector& x) {
  if (x.dim() != col.size()) {
    throw DimensionError("scaled_add: vector dim " + std::to_string(x.dim()) +
                         " != column length " + std::to_string(col.size()));
  }
  if (!std::isfinite(c)) throw std::invalid_argument("scaled_add: non-finite scale");
  if (c == 0.0) return;
  const auto idx = x.indices();
  const auto val = x.values();
  for (std::size_t k = 0; k < idx.size(); ++k) col[idx[k]] += c * val[k];
}

double sparse_sparse_dot(const SparseVector& a, const SparseVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("sparse_sparse_dot: dimension mismatch");
  const auto ia = a.indices();
  const auto ib = b.indices();
  const auto va = a.values();
  const auto vb = b.values();
  double sum = 0.0;
  std::size_t p = 0, q = 0;
  while (p < ia.size() && q < ib.size()) {
    if (ia[p] < ib[q]) {
      ++p;
    } else if (ib[q] < ia[p]) {
      ++q;
    } else {
      sum += va[p++] * vb[q++];
    }
  }
  return sum;
}

}  // namespace altml
