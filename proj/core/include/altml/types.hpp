#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "altml/sparse_vector.hpp"

namespace altml {

using Label = std::uint32_t;

// Relevant labels Y ⊆ [0, L). The complement is implied by total_labels().
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::size_t total_labels) : total_(total_labels) {}
  // Members may be unsorted; duplicates collapse. Throws if any member >= L.
  LabelSet(std::size_t total_labels, std::vector<Label> members);
  LabelSet(std::size_t total_labels, std::initializer_list<Label> members)
      : LabelSet(total_labels, std::vector<Label>(members)) {}

  std::size_t total_labels() const noexcept { return total_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::size_t complement_size() const noexcept { return total_ - members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  std::span<const Label> members() const noexcept { return members_; }
  bool contains(Label l) const;

  // One byte per label, 1 for members.
  std::vector<std::uint8_t> mask() const;
  std::vector<Label> complement() const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::size_t total_ = 0;
  std::vector<Label> members_;
};

struct Example {
  SparseVector x;
  LabelSet y;

  friend bool operator==(const Example&, const Example&) = default;
};

// W = [w(1) .. w(L), w(L+1)]: L label columns plus the threshold column,
// each a dense vector of length d. Stored column-major.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t labels, std::size_t dim);

  std::size_t labels() const noexcept { return labels_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t columns() const noexcept { return labels_ + 1; }
  std::size_t threshold_index() const noexcept { return labels_; }

  std::span<double> column(std::size_t i);
  std::span<const double> column(std::size_t i) const;
  std::span<double> threshold_column() { return column(labels_); }
  std::span<const double> threshold_column() const { return column(labels_); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double frobenius_norm_sq() const;
  bool all_finite() const;

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  std::size_t labels_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace altml
