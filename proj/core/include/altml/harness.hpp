#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "altml/dataset.hpp"
#include "altml/learner.hpp"
#include "altml/metrics.hpp"

namespace altml {

// A fixed comparator classifier U = [u(1) .. u(L+1)].
struct ReferenceClassifier {
  WeightMatrix u;

  double frobenius_norm() const;
};

struct RegretTrace {
  std::vector<double> per_round_loss;             // f_t(W_t), pre-update
  std::vector<double> cumulative_loss;            // running Σ f_t(W_t)
  std::optional<std::vector<double>> reference_loss;  // f_t(U) per round
  std::vector<int> rounds_used;                   // sub-updates per round

  std::size_t rounds() const noexcept { return per_round_loss.size(); }
  double total_loss() const { return cumulative_loss.empty() ? 0.0 : cumulative_loss.back(); }
  std::optional<double> reference_cumulative() const;
  // Σ_{s < t} (f_s(W_s) − f_s(U)) over the first t rounds.
  double regret_at(std::size_t t) const;
};

// Prequential protocol: for each example in order, record the loss of the
// current model, then let the learner update. When `use_ids` is set the
// learner receives each example's index (for an attached Gram matrix).
RegretTrace run_online(const Dataset& ds, OnlineLearner& learner,
                       const ReferenceClassifier* reference = nullptr, bool use_ids = false);

struct RegretBoundCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

// lhs = Σ (f_t(W_t) − f_t(U)); rhs = ‖U‖²_F / (2η) + η R² T.
// Holds when lhs <= rhs (1 + 1e-9).
RegretBoundCheck check_regret_bound(const RegretTrace& trace, const ReferenceClassifier& ref, double R,
                             double eta);

// η = ‖U‖_F / (R √(2T)), the step that balances the two bound terms.
double balanced_eta(double u_norm, double R, std::size_t T);

// Post-hoc SALT bound:
//   (Q/(2η) + η) Σ_i Σ_j ‖G_{1:T,j}(i)‖ + δ/(2η) ‖U‖²_F,
// with Q = max_{i,t} ‖w_t(i) − u(i)‖²_∞ observed during the run.
struct SaltRegretReport {
  RegretTrace trace;
  double q = 0.0;
  double history_norm_sum = 0.0;
  double rhs = 0.0;
};
SaltRegretReport run_salt_with_bound(const Dataset& ds, double eta, double delta,
                                     const ReferenceClassifier& ref, int max_learn = 1);

struct SynthConfig {
  std::size_t d = 20;
  std::size_t labels = 5;
  std::size_t T = 1000;
  double u_norm = 1.0;
  bool margin_rescale = true;
  double noise_p = 0.0;
  double density = 10.0;  // expected nonzeros per instance
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthStream {
  Dataset data;
  ReferenceClassifier reference;
};

// Labels come from the threshold rule of a random U. With margin_rescale, U
// is scaled so every margin has magnitude >= 1 and Σ f_t(U) = 0.
SynthStream synth_stream(const SynthConfig& cfg);

struct GridSpec {
  Algo algo = Algo::falt;
  std::vector<double> etas{1.0};
  std::vector<double> deltas{1.0};
  // M = max(1, round(m L)) for each multiplier m.
  std::vector<double> m_multipliers{1.0};
  std::vector<double> cs{1.0};
  std::vector<double> sigma2s{1.0};
  KernelKind kernel = KernelKind::rbf;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  bool precompute_kernel = true;
  unsigned threads = 1;

  void validate() const;
};

std::vector<LearnerConfig> expand_grid(const GridSpec& spec, std::size_t labels);

struct CvResult {
  std::size_t best = 0;
  std::vector<LearnerConfig> configs;
  std::vector<MetricsReport> reports;  // fold-mean per config
  std::vector<double> seconds;         // wall clock per config
};

// Majority-of-metrics tournament in index order: a challenger replaces the
// incumbent when it wins on more metrics than it loses; on a tie the higher
// F1 wins, then the lower index.
std::size_t select_best(std::span<const MetricsReport> reports);

// k-fold cross-validation with a single pass over each training split.
CvResult cv_grid_search(const Dataset& train, const GridSpec& spec);

// Scores and predictions of a frozen model on every test example.
std::vector<EvalRecord> evaluation_records(const OnlineLearner& model, const Dataset& test);
MetricsReport evaluate(const OnlineLearner& model, const Dataset& test);

// Trains a fresh learner with one pass over ds.examples[order[0]],
// ds.examples[order[1]], ... (all examples in file order when `order` is
// empty). A Gram matrix, when given, must be built over `ds`.
std::unique_ptr<OnlineLearner> train_one_pass(const LearnerConfig& cfg, const Dataset& ds,
                                              std::span<const std::size_t> order = {},
                                              std::shared_ptr<const GramMatrix> gram = nullptr);

// Evaluates on ds.examples[indices[k]], looking kernel values up in the
// learner's attached Gram matrix when it has one.
MetricsReport evaluate_subset(const OnlineLearner& model, const Dataset& ds,
                              std::span<const std::size_t> indices);

}  // namespace altml
