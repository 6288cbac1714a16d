#include "altml/learner.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "altml/errors.hpp"

namespace altml {

// Restores BRModel internals from a snapshot.
class SnapshotAccess {
 public:
  static std::vector<double>& weights(BRModel& m) { return m.weights_; }
  static std::vector<SparseVector>& support(BRModel& m) { return m.support_; }
  static std::vector<double>& coefs(BRModel& m) { return m.coefs_; }
  static std::size_t& skipped(BRModel& m) { return m.skipped_zero_norm_; }
};

namespace {

constexpr const char* kMagic = "altml-model";
constexpr int kVersion = 1;

void put(std::ostream& out, double v) { out << std::hexfloat << v << std::defaultfloat; }

void put_values(std::ostream& out, std::span<const double> vals, std::size_t per_line) {
  for (std::size_t k = 0; k < vals.size(); ++k) {
    put(out, vals[k]);
    out << (((k + 1) % per_line == 0 || k + 1 == vals.size()) ? '\n' : ' ');
  }
}

void put_sparse(std::ostream& out, const SparseVector& x) {
  out << x.nnz();
  const auto idx = x.indices();
  const auto val = x.values();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out << ' ' << idx[k] << ':';
    put(out, val[k]);
  }
}

void put_header(std::ostream& out, Algo algo, std::size_t labels, std::size_t dim) {
  out << kMagic << ' ' << kVersion << '\n'
      << "algo " << to_string(algo) << '\n'
      << "labels " << labels << '\n'
      << "features " << dim << '\n';
}

void put_kernel(std::ostream& out, const KernelDescriptor& k) {
  out << "kernel " << to_string(k.kind) << ' ';
  put(out, k.sigma2);
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string token() {
    std::string t;
    if (!(in_ >> t)) throw std::runtime_error("model snapshot: unexpected end of input");
    return t;
  }

  void expect(const std::string& key) {
    const auto t = token();
    if (t != key) {
      throw std::runtime_error("model snapshot: expected '" + key + "', found '" + t + "'");
    }
  }

  double real() {
    const auto t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw std::runtime_error("model snapshot: bad number '" + t + "'");
    return v;
  }

  std::size_t count() {
    const auto t = token();
    std::size_t pos = 0;
    const auto v = std::stoull(t, &pos);
    if (pos != t.size()) throw std::runtime_error("model snapshot: bad count '" + t + "'");
    return static_cast<std::size_t>(v);
  }

  std::int64_t integer() { return std::stoll(token()); }

  double keyed_real(const std::string& key) {
    expect(key);
    return real();
  }

  std::size_t keyed_count(const std::string& key) {
    expect(key);
    return count();
  }

  std::vector<double> values(const std::string& key, std::size_t expected) {
    if (keyed_count(key) != expected) {
      throw std::runtime_error("model snapshot: '" + key + "' has the wrong length");
    }
    std::vector<double> v(expected);
    for (auto& e : v) e = real();
    return v;
  }

  SparseVector sparse(std::size_t dim) {
    const auto nnz = count();
    std::vector<FeatureIndex> idx(nnz);
    std::vector<double> val(nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
      const auto t = token();
      const auto colon = t.find(':');
      if (colon == std::string::npos) throw std::runtime_error("model snapshot: bad sparse entry");
      idx[k] = static_cast<FeatureIndex>(std::stoul(t.substr(0, colon)));
      val[k] = std::strtod(t.c_str() + colon + 1, nullptr);
    }
    return SparseVector(dim, std::move(idx), std::move(val));
  }

  KernelDescriptor kernel() {
    expect("kernel");
    KernelDescriptor k;
    k.kind = kernel_kind_from_string(token());
    k.sigma2 = real();
    return k;
  }

 private:
  std::istream& in_;
};

}  // namespace

std::string to_string(Algo a) {
  switch (a) {
    case Algo::falt: return "falt";
    case Algo::salt: return "salt";
    case Algo::falt_k: return "falt-k";
    case Algo::pa1_br: return "pa1-br";
    case Algo::pa2_br: return "pa2-br";
    case Algo::pa1k_br: return "pa1k-br";
    case Algo::pa2k_br: return "pa2k-br";
  }
  return "?";
}

Algo algo_from_string(const std::string& s) {
  for (Algo a : {Algo::falt, Algo::salt, Algo::falt_k, Algo::pa1_br, Algo::pa2_br,
                 Algo::pa1k_br, Algo::pa2k_br}) {
    if (to_string(a) == s) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

bool is_kernel_algo(Algo a) {
  return a == Algo::falt_k || a == Algo::pa1k_br || a == Algo::pa2k_br;
}

FaltLearner::FaltLearner(std::size_t labels, std::size_t dim, FaltConfig cfg)
    : w_(labels, dim), cfg_(cfg) {
  cfg_.validate();
}

FaltLearner::FaltLearner(WeightMatrix w, FaltConfig cfg) : w_(std::move(w)), cfg_(cfg) {
  cfg_.validate();
}

void FaltLearner::save(std::ostream& out) const {
  put_header(out, algo(), w_.labels(), w_.dim());
  out << "eta ";
  put(out, cfg_.eta);
  out << "\nmax_learn " << cfg_.max_learn << '\n';
  out << "weights " << w_.data().size() << '\n';
  put_values(out, w_.data(), w_.dim());
  out << "end\n";
}

SaltLearner::SaltLearner(std::size_t labels, std::size_t dim, double eta, double delta,
                         int max_learn)
    : w_(labels, dim), state_(labels, dim, eta, delta, max_learn) {}

SaltLearner::SaltLearner(WeightMatrix w, SaltState state)
    : w_(std::move(w)), state_(std::move(state)) {}

void SaltLearner::save(std::ostream& out) const {
  put_header(out, algo(), w_.labels(), w_.dim());
  out << "eta ";
  put(out, state_.eta());
  out << "\ndelta ";
  put(out, state_.delta());
  out << "\nmax_learn " << state_.max_learn() << '\n';
  out << "weights " << w_.data().size() << '\n';
  put_values(out, w_.data(), w_.dim());
  out << "sq_sum " << state_.sq_sum_data().size() << '\n';
  put_values(out, state_.sq_sum_data(), w_.dim());
  out << "end\n";
}

KernelFaltLearner::KernelFaltLearner(std::size_t labels, std::size_t dim,
                                     KernelDescriptor kernel, FaltConfig cfg)
    : model_(kernel, labels, dim), cfg_(cfg) {
  cfg_.validate();
}

KernelFaltLearner::KernelFaltLearner(KernelModel model, FaltConfig cfg)
    : model_(std::move(model)), cfg_(cfg) {
  cfg_.validate();
}

RoundResult KernelFaltLearner::learn(const Example& ex, std::int64_t example_id) {
  if (gram_ && example_id >= 0) {
    return kfalt_round(model_, ex, cfg_, KernelSource{gram_.get(), example_id});
  }
  return kfalt_round(model_, ex, cfg_);
}

ScoreVector KernelFaltLearner::scores_at(const SparseVector& x, std::int64_t example_id) const {
  if (!gram_ || example_id < 0) return kscore(model_, x);
  std::vector<double> kappa(model_.support_size());
  for (std::size_t k = 0; k < kappa.size(); ++k) {
    const auto sid = model_.support_ids()[k];
    kappa[k] = sid >= 0 ? gram_->at(static_cast<std::size_t>(sid),
                                    static_cast<std::size_t>(example_id))
                        : kernel_eval(model_.kernel(), model_.support()[k], x);
  }
  return kscore_from_row(model_, kappa);
}

void KernelFaltLearner::save(std::ostream& out) const {
  put_header(out, algo(), model_.labels(), model_.dim());
  out << "eta ";
  put(out, cfg_.eta);
  out << "\nmax_learn " << cfg_.max_learn << '\n';
  put_kernel(out, model_.kernel());
  out << "support " << model_.support_size() << '\n';
  for (std::size_t k = 0; k < model_.support_size(); ++k) {
    out << model_.support_ids()[k] << ' ';
    for (double a : model_.alpha_row(k)) {
      put(out, a);
      out << ' ';
    }
    put_sparse(out, model_.support()[k]);
    out << '\n';
  }
  out << "end\n";
}

Algo BRLearner::algo() const {
  const bool k = model_.is_kernel();
  if (model_.variant() == PaVariant::pa1) return k ? Algo::pa1k_br : Algo::pa1_br;
  return k ? Algo::pa2k_br : Algo::pa2_br;
}

RoundResult BRLearner::learn(const Example& ex, std::int64_t) {
  RoundResult r;
  r.loss_before = br_loss(model_, ex);
  const auto before_support = model_.support_size();
  const auto before_skipped = model_.skipped_zero_norm();
  br_round(model_, ex);
  const bool updated = r.loss_before > 0.0 && model_.skipped_zero_norm() == before_skipped &&
                       (!model_.is_kernel() || model_.support_size() > before_support);
  r.rounds_used = updated ? 1 : 0;
  return r;
}

void BRLearner::save(std::ostream& out) const {
  put_header(out, algo(), model_.labels(), model_.dim());
  out << "c ";
  put(out, model_.aggressiveness());
  out << '\n';
  if (model_.kernel()) put_kernel(out, *model_.kernel());
  out << "skipped " << model_.skipped_zero_norm() << '\n';
  if (!model_.is_kernel()) {
    out << "weights " << model_.labels() * model_.dim() << '\n';
    for (std::size_t l = 0; l < model_.labels(); ++l) put_values(out, model_.weights(l), model_.dim());
  } else {
    out << "support " << model_.support_size() << '\n';
    for (std::size_t k = 0; k < model_.support_size(); ++k) {
      for (double a : model_.coef_row(k)) {
        put(out, a);
        out << ' ';
      }
      put_sparse(out, model_.support()[k]);
      out << '\n';
    }
  }
  out << "end\n";
}

std::unique_ptr<OnlineLearner> make_learner(const LearnerConfig& cfg, std::size_t labels,
                                            std::size_t dim) {
  const FaltConfig falt{cfg.eta, cfg.max_learn};
  switch (cfg.algo) {
    case Algo::falt: return std::make_unique<FaltLearner>(labels, dim, falt);
    case Algo::salt:
      return std::make_unique<SaltLearner>(labels, dim, cfg.eta, cfg.delta, cfg.max_learn);
    case Algo::falt_k: return std::make_unique<KernelFaltLearner>(labels, dim, cfg.kernel, falt);
    case Algo::pa1_br:
      return std::make_unique<BRLearner>(BRModel(PaVariant::pa1, cfg.c, labels, dim));
    case Algo::pa2_br:
      return std::make_unique<BRLearner>(BRModel(PaVariant::pa2, cfg.c, labels, dim));
    case Algo::pa1k_br:
      return std::make_unique<BRLearner>(BRModel(PaVariant::pa1, cfg.c, labels, dim, cfg.kernel));
    case Algo::pa2k_br:
      return std::make_unique<BRLearner>(BRModel(PaVariant::pa2, cfg.c, labels, dim, cfg.kernel));
  }
  throw std::invalid_argument("make_learner: unknown algorithm");
}

std::unique_ptr<OnlineLearner> load_learner(std::istream& in) {
  Reader r(in);
  r.expect(kMagic);
  if (r.integer() != kVersion) throw std::runtime_error("model snapshot: unsupported version");
  r.expect("algo");
  const Algo algo = algo_from_string(r.token());
  const auto labels = r.keyed_count("labels");
  const auto dim = r.keyed_count("features");

  std::unique_ptr<OnlineLearner> out;
  switch (algo) {
    case Algo::falt: {
      FaltConfig cfg;
      cfg.eta = r.keyed_real("eta");
      cfg.max_learn = static_cast<int>(r.keyed_count("max_learn"));
      WeightMatrix w(labels, dim);
      const auto vals = r.values("weights", w.data().size());
      std::copy(vals.begin(), vals.end(), w.data().begin());
      out = std::make_unique<FaltLearner>(std::move(w), cfg);
      break;
    }
    case Algo::salt: {
      const double eta = r.keyed_real("eta");
      const double delta = r.keyed_real("delta");
      const int max_learn = static_cast<int>(r.keyed_count("max_learn"));
      WeightMatrix w(labels, dim);
      SaltState st(labels, dim, eta, delta, max_learn);
      const auto wv = r.values("weights", w.data().size());
      std::copy(wv.begin(), wv.end(), w.data().begin());
      const auto sv = r.values("sq_sum", st.sq_sum_data().size());
      std::copy(sv.begin(), sv.end(), st.sq_sum_data().begin());
      out = std::make_unique<SaltLearner>(std::move(w), std::move(st));
      break;
    }
    case Algo::falt_k: {
      FaltConfig cfg;
      cfg.eta = r.keyed_real("eta");
      cfg.max_learn = static_cast<int>(r.keyed_count("max_learn"));
      KernelModel m(r.kernel(), labels, dim);
      const auto n = r.keyed_count("support");
      std::vector<double> row(labels + 1);
      for (std::size_t k = 0; k < n; ++k) {
        const auto id = r.integer();
        for (auto& a : row) a = r.real();
        m.add_support(r.sparse(dim), row, id);
      }
      out = std::make_unique<KernelFaltLearner>(std::move(m), cfg);
      break;
    }
    default: {
      const double c = r.keyed_real("c");
      const bool kernel = is_kernel_algo(algo);
      std::optional<KernelDescriptor> kd;
      if (kernel) kd = r.kernel();
      const auto variant =
          (algo == Algo::pa1_br || algo == Algo::pa1k_br) ? PaVariant::pa1 : PaVariant::pa2;
      BRModel m(variant, c, labels, dim, kd);
      SnapshotAccess::skipped(m) = r.keyed_count("skipped");
      if (!kernel) {
        SnapshotAccess::weights(m) = r.values("weights", labels * dim);
      } else {
        const auto n = r.keyed_count("support");
        for (std::size_t k = 0; k < n; ++k) {
          for (std::size_t l = 0; l < labels; ++l) SnapshotAccess::coefs(m).push_back(r.real());
          SnapshotAccess::support(m).push_back(r.sparse(dim));
        }
      }
      out = std::make_unique<BRLearner>(std::move(m));
      break;
    }
  }
  r.expect("end");
  return out;
}

void save_learner(const OnlineLearner& learner, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model '" + path + "'");
  learner.save(out);
  if (!out) throw std::runtime_error("failed writing model '" + path + "'");
}

std::unique_ptr<OnlineLearner> load_learner(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model '" + path + "'");
  return load_learner(in);
}

}  // namespace altml
