#include "altml/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "altml/errors.hpp"

namespace altml {

std::string to_string(KernelKind kind) { return kind == KernelKind::rbf ? "rbf" : "linear"; }

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "rbf") return KernelKind::rbf;
  if (s == "linear") return KernelKind::linear;
  throw std::invalid_argument("unknown kernel '" + s + "'");
}

void KernelDescriptor::validate() const {
  if (kind == KernelKind::rbf && (!(sigma2 > 0.0) || !std::isfinite(sigma2))) {
    throw std::invalid_argument("rbf kernel needs sigma2 > 0");
  }
}

double kernel_eval(const KernelDescriptor& k, const SparseVector& a, const SparseVector& b) {
  const double dot = sparse_sparse_dot(a, b);
  if (k.kind == KernelKind::linear) return dot;
  const double dist2 = std::max(0.0, a.squared_norm() + b.squared_norm() - 2.0 * dot);
  return std::exp(-dist2 / (2.0 * k.sigma2));
}

GramMatrix::GramMatrix(const Dataset& ds, const KernelDescriptor& kernel)
    : n_(ds.size()), values_(n_ * n_) {
  kernel.validate();
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      const double v = kernel_eval(kernel, ds.examples[i].x, ds.examples[j].x);
      values_[i * n_ + j] = v;
      values_[j * n_ + i] = v;
    }
  }
}

KernelModel::KernelModel(KernelDescriptor kernel, std::size_t labels, std::size_t dim)
    : kernel_(kernel), labels_(labels), dim_(dim) {
  kernel_.validate();
}

std::span<const double> KernelModel::alpha_row(std::size_t k) const {
  return std::span<const double>(alphas_).subspan(k * row_width(), row_width());
}

void KernelModel::add_support(SparseVector x, std::span<const double> alpha,
                              std::int64_t source_id) {
  if (x.dim() != dim_) throw DimensionError("add_support: instance dim mismatch");
  if (alpha.size() != row_width()) throw DimensionError("add_support: alpha row width mismatch");
  if (std::all_of(alpha.begin(), alpha.end(), [](double a) { return a == 0.0; })) return;
  support_.push_back(std::move(x));
  alphas_.insert(alphas_.end(), alpha.begin(), alpha.end());
  support_ids_.push_back(source_id);
}

std::vector<double> kernel_row(const KernelModel& m, const SparseVector& x) {
  if (x.dim() != m.dim()) {
    throw DimensionError("kscore: instance dim " + std::to_string(x.dim()) + " != model dim " +
                         std::to_string(m.dim()));
  }
  std::vector<double> kappa(m.support_size());
  for (std::size_t k = 0; k < kappa.size(); ++k) {
    kappa[k] = kernel_eval(m.kernel(), m.support()[k], x);
  }
  return kappa;
}

ScoreVector kscore_from_row(const KernelModel& m, std::span<const double> kappa) {
  if (kappa.size() != m.support_size()) throw DimensionError("kscore: kernel row length mismatch");
  std::vector<double> acc(m.row_width(), 0.0);
  for (std::size_t k = 0; k < kappa.size(); ++k) {
    const auto row = m.alpha_row(k);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += row[i] * kappa[k];
  }
  ScoreVector s;
  s.threshold_score = acc.back();
  acc.pop_back();
  s.label_scores = std::move(acc);
  return s;
}

ScoreVector kscore(const KernelModel& m, const SparseVector& x) {
  return kscore_from_row(m, kernel_row(m, x));
}

RoundResult kfalt_round(KernelModel& m, const Example& ex, const FaltConfig& cfg,
                        KernelSource source) {
  cfg.validate();
  if (ex.x.dim() != m.dim() || ex.y.total_labels() != m.labels()) {
    throw DimensionError("kfalt: example shape does not match model");
  }

  std::vector<double> kappa;
  double self = 0.0;
  if (source.gram != nullptr) {
    const auto id = static_cast<std::size_t>(source.example_id);
    kappa.resize(m.support_size());
    for (std::size_t k = 0; k < kappa.size(); ++k) {
      const auto sid = m.support_ids()[k];
      if (sid < 0) throw std::invalid_argument("kfalt: support vector without a Gram index");
      kappa[k] = source.gram->at(static_cast<std::size_t>(sid), id);
    }
    self = source.gram->at(id, id);
  } else {
    kappa = kernel_row(m, ex.x);
    self = kernel_eval(m.kernel(), ex.x, ex.x);
  }

  const ScoreVector base = kscore_from_row(m, kappa);
  std::vector<double> pending(m.row_width(), 0.0);
  RoundResult result;
  for (int sub = 0; sub < cfg.max_learn; ++sub) {
    ScoreVector s = base;
    if (sub > 0) {
      for (std::size_t i = 0; i < m.labels(); ++i) s.label_scores[i] += pending[i] * self;
      s.threshold_score += pending.back() * self;
    }
    const LossTerms t = loss_terms(s, ex.y);
    if (sub == 0) result.loss_before = t.loss;
    if (t.loss == 0.0) break;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      pending[i] -= cfg.eta * t.coeffs[i];
      if (!std::isfinite(pending[i])) {
        throw DivergenceError("kfalt: non-finite coefficient; step size too large");
      }
    }
    ++result.rounds_used;
  }
  if (result.rounds_used > 0) m.add_support(ex.x, pending, source.example_id);
  return result;
}

}  // namespace altml
