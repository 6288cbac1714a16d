#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "altml/types.hpp"

namespace altml {

struct Dataset {
  std::vector<Example> examples;
  std::size_t labels = 0;    // L
  std::size_t features = 0;  // d
  std::string name;
  // File label id for each contiguous label; empty when ids were used as-is.
  std::vector<std::int64_t> label_ids;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }
  // Largest ‖x‖ over the examples.
  double max_norm() const;
};

struct ParseOptions {
  bool one_based_features = true;
  bool one_based_labels = false;
  // Map the distinct label ids seen in the file, in ascending order, onto
  // [0, L). Ignored when label_dictionary is given.
  bool compact_labels = false;
  // Reuse a mapping from another file (e.g. the training split's label_ids).
  std::optional<std::vector<std::int64_t>> label_dictionary;
  std::optional<std::size_t> declared_labels;
  std::optional<std::size_t> declared_features;
};

// Parses `lbl,lbl,... idx:val idx:val ...` lines. `#` starts a comment line;
// blank lines are skipped; the label field may be empty.
Dataset parse_multilabel_sparse(std::istream& in, const ParseOptions& options,
                                std::string name = {});

// Reads `<path>.meta` (labels=, features=, one_based=) if present and fills
// the options that the caller left unset.
Dataset load_dataset(const std::string& path, ParseOptions options = {});

// Writes the text format read by parse_multilabel_sparse. Values are written
// with round-trip precision.
void write_multilabel_sparse(std::ostream& out, const Dataset& ds, bool one_based_features = true,
                             bool one_based_labels = false);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Seeded permutation of [0, n) cut into k contiguous blocks whose sizes
// differ by at most one (the first n % k blocks are one larger).
std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);
std::vector<Fold> kfold_split(const Dataset& ds, std::size_t k, std::uint64_t seed);

// Fisher–Yates over [0, n) driven by a 64-bit Mersenne twister. Portable
// across standard libraries (no std::shuffle / std::uniform_int_distribution).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

Dataset permute(const Dataset& ds, std::uint64_t seed);
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

// Per-feature max |x_j| over the dataset (1 where a feature never occurs).
std::vector<double> maxabs_scales(const Dataset& ds);
Dataset apply_scaling(const Dataset& ds, const std::vector<double>& scales);

}  // namespace altml
