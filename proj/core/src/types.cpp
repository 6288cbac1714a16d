#include "altml/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "altml/errors.hpp"

namespace altml {

LabelSet::LabelSet(std::size_t total_labels, std::vector<Label> members)
    : total_(total_labels), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= total_) {
    throw DimensionError("LabelSet: label " + std::to_string(members_.back()) +
                         " outside [0, " + std::to_string(total_) + ")");
  }
}

bool LabelSet::contains(Label l) const {
  return std::binary_search(members_.begin(), members_.end(), l);
}

std::vector<std::uint8_t> LabelSet::mask() const {
  std::vector<std::uint8_t> m(total_, 0);
  for (Label l : members_) m[l] = 1;
  return m;
}

std::vector<Label> LabelSet::complement() const {
  std::vector<Label> out;
  out.reserve(complement_size());
  std::size_t p = 0;
  for (Label l = 0; l < total_; ++l) {
    if (p < members_.size() && members_[p] == l) {
      ++p;
    } else {
      out.push_back(l);
    }
  }
  return out;
}

WeightMatrix::WeightMatrix(std::size_t labels, std::size_t dim)
    : labels_(labels), dim_(dim), data_((labels + 1) * dim, 0.0) {}

std::span<double> WeightMatrix::column(std::size_t i) {
  if (i > labels_) throw DimensionError("WeightMatrix: column index out of range");
  return std::span<double>(data_).subspan(i * dim_, dim_);
}

std::span<const double> WeightMatrix::column(std::size_t i) const {
  if (i > labels_) throw DimensionError("WeightMatrix: column index out of range");
  return std::span<const double>(data_).subspan(i * dim_, dim_);
}

double WeightMatrix::frobenius_norm_sq() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

bool WeightMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace altml
