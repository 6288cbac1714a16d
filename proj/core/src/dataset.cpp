#include "altml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <limits>
#include <random>
#include <sstream>
#include <string_view>

#include "altml/errors.hpp"

namespace altml {
namespace {

struct RawLine {
  std::vector<std::int64_t> labels;
  std::vector<std::pair<FeatureIndex, double>> features;
  std::size_t line_no = 0;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

RawLine parse_line(std::string_view line, std::size_t line_no, const ParseOptions& opt) {
  RawLine raw;
  raw.line_no = line_no;
  auto tokens = split_ws(line);
  std::size_t first_feature = 0;
  // A line starting with whitespace, or whose first token is a feature,
  // has an empty label field.
  if (!tokens.empty() && !is_space(line.front()) &&
      tokens.front().find(':') == std::string_view::npos) {
    std::string_view field = tokens.front();
    first_feature = 1;
    std::size_t start = 0;
    while (start <= field.size()) {
      std::size_t comma = field.find(',', start);
      if (comma == std::string_view::npos) comma = field.size();
      std::string_view tok = field.substr(start, comma - start);
      std::int64_t lbl = 0;
      if (!parse_number(tok, lbl) || lbl < 0) {
        throw ParseError(line_no, "malformed label '" + std::string(tok) + "'");
      }
      if (opt.one_based_labels) {
        if (lbl == 0) throw ParseError(line_no, "label 0 with one-based labels");
        --lbl;
      }
      raw.labels.push_back(lbl);
      start = comma + 1;
    }
  }
  for (std::size_t t = first_feature; t < tokens.size(); ++t) {
    std::string_view tok = tokens[t];
    auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "malformed feature token '" + std::string(tok) + "'");
    }
    std::int64_t idx = 0;
    double val = 0.0;
    if (!parse_number(tok.substr(0, colon), idx) || !parse_number(tok.substr(colon + 1), val) ||
        !std::isfinite(val)) {
      throw ParseError(line_no, "malformed feature token '" + std::string(tok) + "'");
    }
    if (opt.one_based_features) {
      if (idx < 1) throw ParseError(line_no, "feature index 0 with one-based features");
      --idx;
    }
    if (idx < 0 || idx > static_cast<std::int64_t>(UINT32_MAX) - 1) {
      throw ParseError(line_no, "feature index out of range");
    }
    if (opt.declared_features && static_cast<std::size_t>(idx) >= *opt.declared_features) {
      throw ParseError(line_no, "feature index " + std::to_string(idx) +
                                    " >= declared dimension " +
                                    std::to_string(*opt.declared_features));
    }
    raw.features.emplace_back(static_cast<FeatureIndex>(idx), val);
  }
  auto sorted = raw.features;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k].first == sorted[k - 1].first) {
      throw ParseError(line_no, "duplicate feature index " + std::to_string(sorted[k].first));
    }
  }
  return raw;
}

}  // namespace

double Dataset::max_norm() const {
  double m = 0.0;
  for (const auto& ex : examples) m = std::max(m, ex.x.squared_norm());
  return std::sqrt(m);
}

Dataset parse_multilabel_sparse(std::istream& in, const ParseOptions& opt, std::string name) {
  std::vector<RawLine> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    std::size_t p = 0;
    while (p < view.size() && is_space(view[p])) ++p;
    if (p == view.size() || view[p] == '#') continue;
    lines.push_back(parse_line(view, line_no, opt));
  }

  Dataset ds;
  ds.name = std::move(name);

  // Label id -> contiguous id.
  std::map<std::int64_t, Label> remap;
  if (opt.label_dictionary) {
    ds.label_ids = *opt.label_dictionary;
    for (std::size_t k = 0; k < ds.label_ids.size(); ++k) {
      remap[ds.label_ids[k]] = static_cast<Label>(k);
    }
  } else if (opt.compact_labels) {
    for (const auto& r : lines) {
      for (auto l : r.labels) remap[l] = 0;
    }
    Label next = 0;
    for (auto& [id, c] : remap) {
      c = next++;
      ds.label_ids.push_back(id);
    }
  }
  const bool mapped = opt.label_dictionary.has_value() || opt.compact_labels;

  std::int64_t max_label = -1;
  std::int64_t max_feature = -1;
  for (auto& r : lines) {
    for (auto& l : r.labels) {
      if (mapped) {
        auto it = remap.find(l);
        if (it == remap.end()) {
          throw ParseError(r.line_no, "label " + std::to_string(l) + " not in label dictionary");
        }
        l = it->second;
      }
      max_label = std::max(max_label, l);
    }
    for (const auto& f : r.features) max_feature = std::max<std::int64_t>(max_feature, f.first);
  }

  if (opt.declared_labels) {
    ds.labels = *opt.declared_labels;
  } else if (mapped) {
    ds.labels = ds.label_ids.size();
  } else {
    ds.labels = static_cast<std::size_t>(max_label + 1);
  }
  ds.features = opt.declared_features ? *opt.declared_features
                                      : static_cast<std::size_t>(max_feature + 1);
  if (ds.labels < 1 || ds.features < 1) {
    throw std::invalid_argument(
        "dataset has no label/feature dimensions; declare labels= and features=");
  }

  ds.examples.reserve(lines.size());
  for (auto& r : lines) {
    for (auto l : r.labels) {
      if (static_cast<std::size_t>(l) >= ds.labels) {
        throw ParseError(r.line_no, "label " + std::to_string(l) + " >= declared label count " +
                                        std::to_string(ds.labels));
      }
    }
    std::vector<Label> ys(r.labels.begin(), r.labels.end());
    ds.examples.push_back(Example{SparseVector::from_pairs(ds.features, std::move(r.features)),
                                  LabelSet(ds.labels, std::move(ys))});
  }
  return ds;
}

Dataset load_dataset(const std::string& path, ParseOptions options) {
  std::ifstream meta(path + ".meta");
  if (meta) {
    std::string line;
    while (std::getline(meta, line)) {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = trim(std::string_view(line).substr(0, eq));
      std::string value = trim(std::string_view(line).substr(eq + 1));
      if (key == "labels" && !options.declared_labels) {
        options.declared_labels = std::stoul(value);
      } else if (key == "features" && !options.declared_features) {
        options.declared_features = std::stoul(value);
      } else if (key == "one_based") {
        options.one_based_features = (value == "true" || value == "1");
      }
    }
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  auto slash = path.find_last_of('/');
  return parse_multilabel_sparse(in, options,
                                 slash == std::string::npos ? path : path.substr(slash + 1));
}

void write_multilabel_sparse(std::ostream& out, const Dataset& ds, bool one_based_features,
                             bool one_based_labels) {
  const auto old_prec = out.precision(17);
  for (const auto& ex : ds.examples) {
    bool first = true;
    for (Label l : ex.y.members()) {
      if (!first) out << ',';
      std::int64_t id = ds.label_ids.empty() ? static_cast<std::int64_t>(l) : ds.label_ids[l];
      out << (id + (one_based_labels ? 1 : 0));
      first = false;
    }
    const auto idx = ex.x.indices();
    const auto val = ex.x.values();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out << ' ' << (idx[k] + (one_based_features ? 1u : 0u)) << ':' << val[k];
    }
    out << '\n';
  }
  out.precision(old_prec);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    // Unbiased draw from [0, i) by rejection.
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(perm[i - 1], perm[r % bound]);
  }
  return perm;
}

std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
  if (k > n) {
    throw std::invalid_argument("kfold_split: k = " + std::to_string(k) + " exceeds " +
                                std::to_string(n) + " examples");
  }
  const auto perm = seeded_permutation(n, seed);
  std::vector<Fold> folds(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    for (std::size_t p = 0; p < n; ++p) {
      if (p >= start && p < start + len) {
        folds[f].validation.push_back(perm[p]);
      } else {
        folds[f].train.push_back(perm[p]);
      }
    }
    start += len;
  }
  return folds;
}

std::vector<Fold> kfold_split(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  return kfold_split(ds.size(), k, seed);
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.labels = ds.labels;
  out.features = ds.features;
  out.name = ds.name;
  out.label_ids = ds.label_ids;
  out.examples.reserve(indices.size());
  for (auto i : indices) out.examples.push_back(ds.examples.at(i));
  return out;
}

Dataset permute(const Dataset& ds, std::uint64_t seed) {
  return subset(ds, seeded_permutation(ds.size(), seed));
}

std::vector<double> maxabs_scales(const Dataset& ds) {
  std::vector<double> scale(ds.features, 0.0);
  for (const auto& ex : ds.examples) {
    const auto idx = ex.x.indices();
    const auto val = ex.x.values();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      scale[idx[k]] = std::max(scale[idx[k]], std::abs(val[k]));
    }
  }
  for (double& s : scale) {
    if (s == 0.0) s = 1.0;
  }
  return scale;
}

Dataset apply_scaling(const Dataset& ds, const std::vector<double>& scales) {
  if (scales.size() != ds.features) throw DimensionError("apply_scaling: scale length mismatch");
  Dataset out = ds;
  for (auto& ex : out.examples) {
    std::vector<FeatureIndex> idx(ex.x.indices().begin(), ex.x.indices().end());
    std::vector<double> val(ex.x.values().begin(), ex.x.values().end());
    for (std::size_t k = 0; k < idx.size(); ++k) val[k] /= scales[idx[k]];
    ex.x = SparseVector(ds.features, std::move(idx), std::move(val));
  }
  return out;
}

}  // namespace altml
