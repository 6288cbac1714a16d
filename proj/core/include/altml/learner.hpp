#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include "altml/baselines.hpp"
#include "altml/kernel.hpp"
#include "altml/linear_learners.hpp"
#include "altml/loss.hpp"

namespace altml {

enum class Algo { falt, salt, falt_k, pa1_br, pa2_br, pa1k_br, pa2k_br };

// CLI spelling: falt, salt, falt-k, pa1-br, pa2-br, pa1k-br, pa2k-br.
std::string to_string(Algo a);
Algo algo_from_string(const std::string& s);
bool is_kernel_algo(Algo a);

struct LearnerConfig {
  Algo algo = Algo::falt;
  double eta = 1.0;
  double delta = 1.0;  // SALT only
  int max_learn = 1;   // ALT learners only
  double c = 1.0;      // PA baselines only
  KernelDescriptor kernel;
};

// Common face of every online learner so the protocol driver, evaluation
// and the CLI can treat them uniformly. Scores of BR models carry a zero
// threshold.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual Algo algo() const = 0;
  virtual std::size_t labels() const = 0;
  virtual std::size_t dim() const = 0;
  virtual ScoreVector scores(const SparseVector& x) const = 0;
  // Same as scores(x), but may use the attached Gram matrix row `example_id`.
  virtual ScoreVector scores_at(const SparseVector& x, std::int64_t /*example_id*/) const {
    return scores(x);
  }
  LabelSet predict(const SparseVector& x) const { return predict_from_scores(scores(x)); }
  // Loss of the current model on ex: the ALT loss for ALT learners, the mean
  // per-label hinge loss for BR baselines.
  virtual double loss(const Example& ex) const = 0;
  // `example_id` indexes the attached Gram matrix, if any.
  virtual RoundResult learn(const Example& ex, std::int64_t example_id = -1) = 0;
  virtual std::size_t support_size() const { return 0; }
  // Kernel learners only; others ignore it.
  virtual void attach_gram(std::shared_ptr<const GramMatrix> /*gram*/) {}
  virtual void save(std::ostream& out) const = 0;
  virtual std::unique_ptr<OnlineLearner> clone() const = 0;
};

class FaltLearner final : public OnlineLearner {
 public:
  FaltLearner(std::size_t labels, std::size_t dim, FaltConfig cfg);
  FaltLearner(WeightMatrix w, FaltConfig cfg);

  Algo algo() const override { return Algo::falt; }
  std::size_t labels() const override { return w_.labels(); }
  std::size_t dim() const override { return w_.dim(); }
  ScoreVector scores(const SparseVector& x) const override { return score(w_, x); }
  double loss(const Example& ex) const override { return loss_eval(w_, ex); }
  RoundResult learn(const Example& ex, std::int64_t = -1) override {
    return falt_round(w_, ex, cfg_);
  }
  void save(std::ostream& out) const override;
  std::unique_ptr<OnlineLearner> clone() const override {
    return std::make_unique<FaltLearner>(*this);
  }

  const WeightMatrix& weights() const noexcept { return w_; }
  const FaltConfig& config() const noexcept { return cfg_; }

 private:
  WeightMatrix w_;
  FaltConfig cfg_;
};

class SaltLearner final : public OnlineLearner {
 public:
  SaltLearner(std::size_t labels, std::size_t dim, double eta, double delta, int max_learn);
  SaltLearner(WeightMatrix w, SaltState state);

  Algo algo() const override { return Algo::salt; }
  std::size_t labels() const override { return w_.labels(); }
  std::size_t dim() const override { return w_.dim(); }
  ScoreVector scores(const SparseVector& x) const override { return score(w_, x); }
  double loss(const Example& ex) const override { return loss_eval(w_, ex); }
  RoundResult learn(const Example& ex, std::int64_t = -1) override {
    return salt_round(w_, state_, ex);
  }
  void save(std::ostream& out) const override;
  std::unique_ptr<OnlineLearner> clone() const override {
    return std::make_unique<SaltLearner>(*this);
  }

  const WeightMatrix& weights() const noexcept { return w_; }
  const SaltState& state() const noexcept { return state_; }

 private:
  WeightMatrix w_;
  SaltState state_;
};

class KernelFaltLearner final : public OnlineLearner {
 public:
  KernelFaltLearner(std::size_t labels, std::size_t dim, KernelDescriptor kernel, FaltConfig cfg);
  KernelFaltLearner(KernelModel model, FaltConfig cfg);

  Algo algo() const override { return Algo::falt_k; }
  std::size_t labels() const override { return model_.labels(); }
  std::size_t dim() const override { return model_.dim(); }
  ScoreVector scores(const SparseVector& x) const override { return kscore(model_, x); }
  ScoreVector scores_at(const SparseVector& x, std::int64_t example_id) const override;
  double loss(const Example& ex) const override {
    return loss_from_scores(kscore(model_, ex.x), ex.y);
  }
  RoundResult learn(const Example& ex, std::int64_t example_id = -1) override;
  std::size_t support_size() const override { return model_.support_size(); }
  void attach_gram(std::shared_ptr<const GramMatrix> gram) override { gram_ = std::move(gram); }
  void save(std::ostream& out) const override;
  std::unique_ptr<OnlineLearner> clone() const override {
    return std::make_unique<KernelFaltLearner>(*this);
  }

  const KernelModel& model() const noexcept { return model_; }
  const FaltConfig& config() const noexcept { return cfg_; }

 private:
  KernelModel model_;
  FaltConfig cfg_;
  std::shared_ptr<const GramMatrix> gram_;
};

class BRLearner final : public OnlineLearner {
 public:
  explicit BRLearner(BRModel model) : model_(std::move(model)) {}

  Algo algo() const override;
  std::size_t labels() const override { return model_.labels(); }
  std::size_t dim() const override { return model_.dim(); }
  ScoreVector scores(const SparseVector& x) const override { return br_score(model_, x); }
  double loss(const Example& ex) const override { return br_loss(model_, ex); }
  RoundResult learn(const Example& ex, std::int64_t = -1) override;
  std::size_t support_size() const override { return model_.support_size(); }
  void save(std::ostream& out) const override;
  std::unique_ptr<OnlineLearner> clone() const override {
    return std::make_unique<BRLearner>(*this);
  }

  const BRModel& model() const noexcept { return model_; }

 private:
  BRModel model_;
};

std::unique_ptr<OnlineLearner> make_learner(const LearnerConfig& cfg, std::size_t labels,
                                            std::size_t dim);

// Snapshot round trip. Doubles are stored as hexadecimal floating point so a
// reloaded model reproduces scores bit for bit.
std::unique_ptr<OnlineLearner> load_learner(std::istream& in);
void save_learner(const OnlineLearner& learner, const std::string& path);
std::unique_ptr<OnlineLearner> load_learner(const std::string& path);

}  // namespace altml
