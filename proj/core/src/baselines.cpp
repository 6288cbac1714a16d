#include "altml/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "altml/errors.hpp"

namespace altml {

std::string to_string(PaVariant v) { return v == PaVariant::pa1 ? "PA-I" : "PA-II"; }

BRModel::BRModel(PaVariant variant, double c, std::size_t labels, std::size_t dim,
                 std::optional<KernelDescriptor> kernel)
    : variant_(variant), c_(c), labels_(labels), dim_(dim), kernel_(kernel) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("PA aggressiveness C must be > 0");
  if (kernel_) {
    kernel_->validate();
  } else {
    weights_.assign(labels * dim, 0.0);
  }
}

std::span<double> BRModel::weights(std::size_t l) {
  return std::span<double>(weights_).subspan(l * dim_, dim_);
}

std::span<const double> BRModel::weights(std::size_t l) const {
  return std::span<const double>(weights_).subspan(l * dim_, dim_);
}

std::span<const double> BRModel::coef_row(std::size_t k) const {
  return std::span<const double>(coefs_).subspan(k * labels_, labels_);
}

std::vector<double> BRModel::scores(const SparseVector& x) const {
  if (x.dim() != dim_) throw DimensionError("br: instance dim does not match model");
  std::vector<double> s(labels_, 0.0);
  if (!kernel_) {
    for (std::size_t l = 0; l < labels_; ++l) s[l] = sparse_dot(x, weights(l));
    return s;
  }
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const double kv = kernel_eval(*kernel_, support_[k], x);
    const auto row = coef_row(k);
    for (std::size_t l = 0; l < labels_; ++l) s[l] += row[l] * kv;
  }
  return s;
}

ScoreVector br_score(const BRModel& m, const SparseVector& x) {
  return ScoreVector{m.scores(x), 0.0};
}

LabelSet br_predict(const BRModel& m, const SparseVector& x) {
  return predict_from_scores(br_score(m, x));
}

double br_loss(const BRModel& m, const Example& ex) {
  const auto s = m.scores(ex.x);
  const auto mask = ex.y.mask();
  double sum = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) {
    const double y = mask[l] ? 1.0 : -1.0;
    sum += std::max(0.0, 1.0 - y * s[l]);
  }
  return sum / static_cast<double>(s.size());
}

void br_round(BRModel& m, const Example& ex) {
  if (ex.x.dim() != m.dim_ || ex.y.total_labels() != m.labels_) {
    throw DimensionError("br: example shape does not match model");
  }
  const auto s = m.scores(ex.x);
  const auto mask = ex.y.mask();
  const double norm2 = m.kernel_ ? kernel_eval(*m.kernel_, ex.x, ex.x) : ex.x.squared_norm();

  std::vector<double> step(m.labels_, 0.0);
  bool any_loss = false;
  for (std::size_t l = 0; l < m.labels_; ++l) {
    const double y = mask[l] ? 1.0 : -1.0;
    const double hinge = std::max(0.0, 1.0 - y * s[l]);
    if (hinge == 0.0) continue;
    any_loss = true;
    if (norm2 <= 0.0) continue;
    const double tau = m.variant_ == PaVariant::pa1 ? std::min(m.c_, hinge / norm2)
                                                    : hinge / (norm2 + 1.0 / (2.0 * m.c_));
    step[l] = tau * y;
  }
  if (any_loss && norm2 <= 0.0) {
    ++m.skipped_zero_norm_;
    return;
  }
  if (!any_loss) return;

  if (!m.kernel_) {
    for (std::size_t l = 0; l < m.labels_; ++l) {
      if (step[l] != 0.0) scaled_add(m.weights(l), step[l], ex.x);
    }
    return;
  }
  m.support_.push_back(ex.x);
  m.coefs_.insert(m.coefs_.end(), step.begin(), step.end());
}

}  // namespace altml
