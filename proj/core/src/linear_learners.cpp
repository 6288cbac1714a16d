#include "altml/linear_learners.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "altml/errors.hpp"

namespace altml {
namespace {

void check_dims(const WeightMatrix& w, const Example& ex) {
  if (ex.x.dim() != w.dim() || ex.y.total_labels() != w.labels()) {
    throw DimensionError("example shape (L=" + std::to_string(ex.y.total_labels()) +
                         ", d=" + std::to_string(ex.x.dim()) + ") does not match model (L=" +
                         std::to_string(w.labels()) + ", d=" + std::to_string(w.dim()) + ")");
  }
}

void check_support_finite(const WeightMatrix& w, std::size_t column, const SparseVector& x,
                          const char* what) {
  const auto col = w.column(column);
  for (auto j : x.indices()) {
    if (!std::isfinite(col[j])) {
      throw DivergenceError(std::string(what) + ": non-finite weight in column " +
                            std::to_string(column) + "; step size too large");
    }
  }
}

}  // namespace

void FaltConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("eta must be finite and positive");
  }
  if (max_learn < 1) throw std::invalid_argument("max_learn must be >= 1");
}

RoundResult falt_round(WeightMatrix& w, const Example& ex, const FaltConfig& cfg) {
  cfg.validate();
  check_dims(w, ex);
  RoundResult result;
  for (int m = 0; m < cfg.max_learn; ++m) {
    const GradientResult g = subgradient(w, ex);
    if (m == 0) result.loss_before = g.loss;
    if (g.loss == 0.0) break;
    for (std::size_t i = 0; i < w.columns(); ++i) {
      const double c = g.gradient.coeffs[i];
      if (c == 0.0) continue;
      scaled_add(w.column(i), -cfg.eta * c, ex.x);
      check_support_finite(w, i, ex.x, "falt");
    }
    ++result.rounds_used;
  }
  return result;
}

SaltState::SaltState(std::size_t labels, std::size_t dim, double eta, double delta,
                     int max_learn)
    : labels_(labels),
      dim_(dim),
      eta_(eta),
      delta_(delta),
      max_learn_(max_learn),
      sq_sum_((labels + 1) * dim, 0.0) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("eta must be finite and positive");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("delta must be finite and positive");
  }
  if (max_learn < 1) throw std::invalid_argument("max_learn must be >= 1");
}

std::span<double> SaltState::sq_sum(std::size_t column) {
  return std::span<double>(sq_sum_).subspan(column * dim_, dim_);
}

std::span<const double> SaltState::sq_sum(std::size_t column) const {
  return std::span<const double>(sq_sum_).subspan(column * dim_, dim_);
}

double SaltState::history_norm_sum() const {
  double s = 0.0;
  for (double v : sq_sum_) s += std::sqrt(v);
  return s;
}

RoundResult salt_round(WeightMatrix& w, SaltState& state, const Example& ex) {
  check_dims(w, ex);
  if (state.labels() != w.labels() || state.dim() != w.dim()) {
    throw DimensionError("salt: state shape does not match model");
  }
  const auto idx = ex.x.indices();
  const auto val = ex.x.values();
  RoundResult result;
  for (int m = 0; m < state.max_learn(); ++m) {
    const GradientResult g = subgradient(w, ex);
    if (m == 0) result.loss_before = g.loss;
    if (g.loss == 0.0) break;
    for (std::size_t i = 0; i < w.columns(); ++i) {
      const double c = g.gradient.coeffs[i];
      if (c == 0.0) continue;
      auto col = w.column(i);
      auto acc = state.sq_sum(i);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double gj = c * val[k];
        acc[idx[k]] += gj * gj;
        col[idx[k]] -= state.eta() * gj / (state.delta() + std::sqrt(acc[idx[k]]));
      }
      check_support_finite(w, i, ex.x, "salt");
    }
    ++result.rounds_used;
  }
  return result;
}

int repeat_count(double multiplier, std::size_t labels) {
  const double m = std::round(multiplier * static_cast<double>(labels));
  return std::max(1, static_cast<int>(m));
}

}  // namespace altml
