#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "altml/types.hpp"

namespace altml::testing {

inline SparseVector random_sparse(std::mt19937_64& rng, std::size_t dim, double density = 0.5) {
  std::bernoulli_distribution keep(density);
  std::normal_distribution<double> val(0.0, 1.0);
  std::vector<FeatureIndex> idx;
  std::vector<double> vals;
  for (std::size_t j = 0; j < dim; ++j) {
    if (keep(rng)) {
      idx.push_back(static_cast<FeatureIndex>(j));
      vals.push_back(val(rng));
    }
  }
  return SparseVector(dim, std::move(idx), std::move(vals));
}

inline SparseVector random_dense(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> val(0.0, 1.0);
  std::vector<double> d(dim);
  for (auto& v : d) v = val(rng);
  return SparseVector::from_dense(d);
}

inline LabelSet random_labels(std::mt19937_64& rng, std::size_t labels, double p = 0.4) {
  std::bernoulli_distribution in(p);
  std::vector<Label> m;
  for (std::size_t i = 0; i < labels; ++i)
    if (in(rng)) m.push_back(static_cast<Label>(i));
  return LabelSet(labels, std::move(m));
}

inline WeightMatrix random_weights(std::mt19937_64& rng, std::size_t labels, std::size_t dim,
                                   double scale = 1.0) {
  std::normal_distribution<double> val(0.0, scale);
  WeightMatrix w(labels, dim);
  for (auto& v : w.data()) v = val(rng);
  return w;
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(rel * scale, abs_floor);
}

}  // namespace altml::testing
