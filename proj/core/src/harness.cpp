#include "altml/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <limits>
#include <mutex>
#include <thread>

#include "altml/errors.hpp"

namespace altml {

double ReferenceClassifier::frobenius_norm() const { return std::sqrt(u.frobenius_norm_sq()); }

std::optional<double> RegretTrace::reference_cumulative() const {
  if (!reference_loss) return std::nullopt;
  double s = 0.0;
  for (double v : *reference_loss) s += v;
  return s;
}

double RegretTrace::regret_at(std::size_t t) const {
  if (t > rounds()) throw std::out_of_range("regret_at: t exceeds trace length");
  if (t == 0) return 0.0;
  double ref = 0.0;
  if (reference_loss) {
    for (std::size_t s = 0; s < t; ++s) ref += (*reference_loss)[s];
  }
  return cumulative_loss[t - 1] - ref;
}

RegretTrace run_online(const Dataset& ds, OnlineLearner& learner,
                       const ReferenceClassifier* reference, bool use_ids) {
  RegretTrace trace;
  trace.per_round_loss.reserve(ds.size());
  trace.cumulative_loss.reserve(ds.size());
  trace.rounds_used.reserve(ds.size());
  if (reference) trace.reference_loss.emplace().reserve(ds.size());
  double running = 0.0;
  for (std::size_t t = 0; t < ds.size(); ++t) {
    const Example& ex = ds.examples[t];
    const double f = learner.loss(ex);
    running += f;
    trace.per_round_loss.push_back(f);
    trace.cumulative_loss.push_back(running);
    if (reference) trace.reference_loss->push_back(loss_eval(reference->u, ex));
    const auto r = learner.learn(ex, use_ids ? static_cast<std::int64_t>(t) : -1);
    trace.rounds_used.push_back(r.rounds_used);
  }
  return trace;
}

RegretBoundCheck check_regret_bound(const RegretTrace& trace, const ReferenceClassifier& ref, double R,
                             double eta) {
  const auto ref_total = trace.reference_cumulative();
  if (!ref_total) throw std::invalid_argument("check_regret_bound: trace has no reference losses");
  if (!(eta > 0.0)) throw std::invalid_argument("check_regret_bound: eta must be > 0");
  RegretBoundCheck c;
  c.lhs = trace.total_loss() - *ref_total;
  c.rhs = ref.u.frobenius_norm_sq() / (2.0 * eta) +
          eta * R * R * static_cast<double>(trace.rounds());
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-9);
  return c;
}

double balanced_eta(double u_norm, double R, std::size_t T) {
  if (!(R > 0.0) || T == 0) throw std::invalid_argument("balanced_eta: need R > 0 and T > 0");
  return u_norm / (R * std::sqrt(2.0 * static_cast<double>(T)));
}

SaltRegretReport run_salt_with_bound(const Dataset& ds, double eta, double delta,
                                     const ReferenceClassifier& ref, int max_learn) {
  SaltLearner learner(ds.labels, ds.features, eta, delta, max_learn);
  SaltRegretReport rep;
  auto& trace = rep.trace;
  trace.reference_loss.emplace();
  double running = 0.0;
  const auto update_q = [&] {
    const auto w = learner.weights().data();
    const auto u = ref.u.data();
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double diff = w[k] - u[k];
      rep.q = std::max(rep.q, diff * diff);
    }
  };
  for (const auto& ex : ds.examples) {
    update_q();
    const double f = learner.loss(ex);
    running += f;
    trace.per_round_loss.push_back(f);
    trace.cumulative_loss.push_back(running);
    trace.reference_loss->push_back(loss_eval(ref.u, ex));
    trace.rounds_used.push_back(learner.learn(ex, -1).rounds_used);
  }
  rep.history_norm_sum = learner.state().history_norm_sum();
  rep.rhs = (rep.q / (2.0 * eta) + eta) * rep.history_norm_sum +
            delta / (2.0 * eta) * ref.u.frobenius_norm_sq();
  return rep;
}

void SynthConfig::validate() const {
  if (d < 1 || labels < 1 || T < 1) throw std::invalid_argument("synth: d, L, T must be >= 1");
  if (!(density > 0.0) || density > static_cast<double>(d)) {
    throw std::invalid_argument("synth: density must lie in (0, d]");
  }
  if (!(noise_p >= 0.0) || noise_p >= 1.0) throw std::invalid_argument("synth: noise_p in [0,1)");
  if (!(u_norm > 0.0)) throw std::invalid_argument("synth: u_norm must be > 0");
}

SynthStream synth_stream(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  WeightMatrix u(cfg.labels, cfg.d);
  for (double& v : u.data()) v = normal(rng);
  const double scale = cfg.u_norm / std::sqrt(u.frobenius_norm_sq());
  for (double& v : u.data()) v *= scale;

  const double p_keep = cfg.density / static_cast<double>(cfg.d);
  constexpr int kMaxRetries = 10000;

  std::vector<SparseVector> xs;
  std::vector<std::vector<double>> margins;
  xs.reserve(cfg.T);
  margins.reserve(cfg.T);
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < cfg.T; ++t) {
    int tries = 0;
    for (;;) {
      if (++tries > kMaxRetries) throw std::runtime_error("synth: too many degenerate draws");
      std::vector<FeatureIndex> idx;
      std::vector<double> val;
      for (std::size_t j = 0; j < cfg.d; ++j) {
        if (unif(rng) < p_keep) {
          idx.push_back(static_cast<FeatureIndex>(j));
          val.push_back(normal(rng));
        }
      }
      SparseVector x(cfg.d, std::move(idx), std::move(val));
      if (x.empty()) continue;
      const ScoreVector s = score(u, x);
      std::vector<double> m(cfg.labels);
      bool zero = false;
      for (std::size_t i = 0; i < cfg.labels; ++i) {
        m[i] = s.label_scores[i] - s.threshold_score;
        zero = zero || m[i] == 0.0;
      }
      if (zero) continue;
      for (double v : m) min_margin = std::min(min_margin, std::abs(v));
      xs.push_back(std::move(x));
      margins.push_back(std::move(m));
      break;
    }
  }

  if (cfg.margin_rescale) {
    double factor = std::max(1.0, 1.0 / min_margin);
    // Absorb rounding in the rescaled scores.
    factor *= 1.0 + 1e-9;
    for (;;) {
      WeightMatrix scaled = u;
      for (double& v : scaled.data()) v *= factor;
      bool ok = true;
      for (std::size_t t = 0; t < xs.size() && ok; ++t) {
        const ScoreVector s = score(scaled, xs[t]);
        for (std::size_t i = 0; i < cfg.labels; ++i) {
          if (std::abs(s.label_scores[i] - s.threshold_score) < 1.0) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        u = std::move(scaled);
        break;
      }
      factor *= 1.0 + 1e-6;
    }
  }

  SynthStream out;
  out.data.labels = cfg.labels;
  out.data.features = cfg.d;
  out.data.name = "synth-" + std::to_string(cfg.seed);
  out.data.examples.reserve(cfg.T);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    std::vector<Label> ys;
    for (std::size_t i = 0; i < cfg.labels; ++i) {
      bool relevant = margins[t][i] > 0.0;
      if (cfg.noise_p > 0.0 && unif(rng) < cfg.noise_p) relevant = !relevant;
      if (relevant) ys.push_back(static_cast<Label>(i));
    }
    out.data.examples.push_back(Example{std::move(xs[t]), LabelSet(cfg.labels, std::move(ys))});
  }
  out.reference.u = std::move(u);
  return out;
}

void GridSpec::validate() const {
  if (folds < 2) throw std::invalid_argument("grid: folds must be >= 2");
  const auto nonempty = [](const std::vector<double>& v, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string("grid: empty value list for ") + what);
  };
  nonempty(etas, "eta");
  nonempty(deltas, "delta");
  nonempty(m_multipliers, "M multiplier");
  nonempty(cs, "C");
  nonempty(sigma2s, "sigma2");
}

std::vector<LearnerConfig> expand_grid(const GridSpec& spec, std::size_t labels) {
  spec.validate();
  const bool alt = spec.algo == Algo::falt || spec.algo == Algo::salt || spec.algo == Algo::falt_k;
  const bool kernel = is_kernel_algo(spec.algo);
  const std::vector<double> one{1.0};
  const auto& etas = alt ? spec.etas : one;
  const auto& deltas = spec.algo == Algo::salt ? spec.deltas : one;
  const auto& ms = alt ? spec.m_multipliers : one;
  const auto& cs = alt ? one : spec.cs;
  const auto& sigmas = (kernel && spec.kernel == KernelKind::rbf) ? spec.sigma2s : one;

  std::vector<LearnerConfig> out;
  for (double s2 : sigmas) {
    for (double eta : etas) {
      for (double delta : deltas) {
        for (double m : ms) {
          for (double c : cs) {
            LearnerConfig cfg;
            cfg.algo = spec.algo;
            cfg.eta = eta;
            cfg.delta = delta;
            cfg.max_learn = alt ? repeat_count(m, labels) : 1;
            cfg.c = c;
            cfg.kernel = KernelDescriptor{spec.kernel, s2};
            out.push_back(cfg);
          }
        }
      }
    }
  }
  return out;
}

std::size_t select_best(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw std::invalid_argument("select_best: no reports");
  std::size_t best = 0;
  for (std::size_t k = 1; k < reports.size(); ++k) {
    const auto cmp = compare_reports(reports[k], reports[best]);
    if (cmp.better > cmp.worse ||
        (cmp.better == cmp.worse && reports[k].f1 > reports[best].f1)) {
      best = k;
    }
  }
  return best;
}

std::unique_ptr<OnlineLearner> train_one_pass(const LearnerConfig& cfg, const Dataset& ds,
                                              std::span<const std::size_t> order,
                                              std::shared_ptr<const GramMatrix> gram) {
  auto learner = make_learner(cfg, ds.labels, ds.features);
  const bool ids = gram != nullptr;
  if (gram) learner->attach_gram(std::move(gram));
  if (order.empty()) {
    for (std::size_t t = 0; t < ds.size(); ++t) {
      learner->learn(ds.examples[t], ids ? static_cast<std::int64_t>(t) : -1);
    }
  } else {
    for (auto t : order) learner->learn(ds.examples.at(t), ids ? static_cast<std::int64_t>(t) : -1);
  }
  return learner;
}

MetricsReport evaluate_subset(const OnlineLearner& model, const Dataset& ds,
                              std::span<const std::size_t> indices) {
  std::vector<EvalRecord> records;
  records.reserve(indices.size());
  for (auto i : indices) {
    const auto& ex = ds.examples.at(i);
    ScoreVector s = model.scores_at(ex.x, static_cast<std::int64_t>(i));
    LabelSet pred = predict_from_scores(s);
    records.push_back(EvalRecord{ex.y, std::move(pred), std::move(s)});
  }
  return compute_metrics(records);
}

std::vector<EvalRecord> evaluation_records(const OnlineLearner& model, const Dataset& test) {
  if (test.features != model.dim() || test.labels != model.labels()) {
    throw DimensionError("evaluate: test set shape (L=" + std::to_string(test.labels) + ", d=" +
                         std::to_string(test.features) + ") does not match model (L=" +
                         std::to_string(model.labels()) + ", d=" + std::to_string(model.dim()) +
                         ")");
  }
  std::vector<EvalRecord> records;
  records.reserve(test.size());
  for (const auto& ex : test.examples) {
    ScoreVector s = model.scores(ex.x);
    LabelSet pred = predict_from_scores(s);
    records.push_back(EvalRecord{ex.y, std::move(pred), std::move(s)});
  }
  return records;
}

MetricsReport evaluate(const OnlineLearner& model, const Dataset& test) {
  return compute_metrics(evaluation_records(model, test));
}

CvResult cv_grid_search(const Dataset& train, const GridSpec& spec) {
  CvResult result;
  result.configs = expand_grid(spec, train.labels);
  if (result.configs.empty()) throw std::invalid_argument("cv_grid_search: empty grid");
  const auto folds = kfold_split(train, spec.folds, spec.seed);
  result.reports.resize(result.configs.size());
  result.seconds.resize(result.configs.size());

  // One Gram matrix per kernel width, shared read-only by all cells.
  std::map<double, std::shared_ptr<const GramMatrix>> grams;
  if (spec.precompute_kernel && is_kernel_algo(spec.algo)) {
    for (const auto& cfg : result.configs) {
      if (!grams.count(cfg.kernel.sigma2)) {
        grams[cfg.kernel.sigma2] = std::make_shared<GramMatrix>(train, cfg.kernel);
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= result.configs.size()) return;
      try {
        const auto start = std::chrono::steady_clock::now();
        const auto& cfg = result.configs[c];
        std::shared_ptr<const GramMatrix> gram;
        if (auto it = grams.find(cfg.kernel.sigma2); it != grams.end()) gram = it->second;
        std::vector<MetricsReport> fold_reports;
        fold_reports.reserve(folds.size());
        for (const auto& fold : folds) {
          auto learner = train_one_pass(cfg, train, fold.train, gram);
          fold_reports.push_back(evaluate_subset(*learner, train, fold.validation));
        }
        result.reports[c] = average_reports(fold_reports);
        result.seconds[c] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = result.configs.size();
      }
    }
  };
  const unsigned n_threads = std::max(1u, spec.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  result.best = select_best(result.reports);
  return result;
}

}  // namespace altml
