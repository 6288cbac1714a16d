#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "altml/errors.hpp"
#include "altml/harness.hpp"
#include "../support/fixtures.hpp"

using namespace altml;
namespace tf = altml::testing;

namespace {

SynthStream small_stream(std::uint64_t seed, std::size_t T = 300, double noise = 0.0) {
  SynthConfig cfg;
  cfg.d = 12;
  cfg.labels = 4;
  cfg.T = T;
  cfg.seed = seed;
  cfg.density = 6;
  cfg.noise_p = noise;
  return synth_stream(cfg);
}

std::string snapshot(const OnlineLearner& l) {
  std::ostringstream os;
  l.save(os);
  return os.str();
}

}  // namespace

TEST_CASE("single example from a zero model costs 2") {
  Dataset ds;
  ds.labels = 2;
  ds.features = 1;
  ds.examples.push_back({SparseVector(1, {0}, {1.0}), LabelSet(2, {1})});
  FaltLearner l(2, 1, {1.0, 1});
  const auto trace = run_online(ds, l);
  CHECK(trace.rounds() == 1);
  CHECK(trace.total_loss() == 2.0);
  CHECK_FALSE(trace.reference_cumulative().has_value());
}

TEST_CASE("a separating model sees zero loss and does not change") {
  const auto s = small_stream(1);
  FaltLearner l(s.reference.u, {0.5, 3});
  const auto before = snapshot(l);
  const auto trace = run_online(s.data, l, &s.reference);
  CHECK(trace.total_loss() == 0.0);
  CHECK(*trace.reference_cumulative() == 0.0);
  CHECK(snapshot(l) == before);
}

TEST_CASE("replays are bit-identical") {
  const auto s = small_stream(2);
  for (Algo a : {Algo::falt, Algo::salt, Algo::falt_k, Algo::pa1_br, Algo::pa2k_br}) {
    LearnerConfig cfg;
    cfg.algo = a;
    cfg.eta = 0.3;
    cfg.max_learn = 2;
    auto l1 = make_learner(cfg, 4, 12), l2 = make_learner(cfg, 4, 12);
    const auto t1 = run_online(s.data, *l1, &s.reference);
    const auto t2 = run_online(s.data, *l2, &s.reference);
    CHECK(t1.per_round_loss == t2.per_round_loss);
    CHECK(snapshot(*l1) == snapshot(*l2));
  }
}

TEST_CASE("losses are recorded before each update") {
  const auto s = small_stream(3);
  FaltLearner l(4, 12, {0.4, 2});
  FaltLearner shadow(4, 12, {0.4, 2});
  const auto trace = run_online(s.data, l);
  double sum = 0.0;
  for (std::size_t t = 0; t < s.data.size(); ++t) {
    CHECK(trace.per_round_loss[t] == shadow.loss(s.data.examples[t]));
    shadow.learn(s.data.examples[t]);
    sum += trace.per_round_loss[t];
    CHECK(trace.cumulative_loss[t] == sum);
    if (t > 0) CHECK(trace.cumulative_loss[t] >= trace.cumulative_loss[t - 1]);
  }
  CHECK(trace.regret_at(0) == 0.0);
}

TEST_CASE("bound check arithmetic") {
  const auto s = small_stream(4);
  const double R = s.data.max_norm();
  const double u2 = s.reference.u.frobenius_norm_sq();
  FaltLearner l(4, 12, {0.5, 1});
  const auto trace = run_online(s.data, l, &s.reference);
  const auto a = check_regret_bound(trace, s.reference, R, 0.5);
  CHECK(a.lhs == trace.total_loss());
  CHECK(a.rhs == doctest::Approx(u2 / 1.0 + 0.5 * R * R * 300).epsilon(1e-14));
  CHECK(a.holds);
  const auto b = check_regret_bound(trace, s.reference, R, 1.0);
  CHECK(b.rhs == doctest::Approx(u2 / 2.0 + 1.0 * R * R * 300).epsilon(1e-14));

  RegretTrace empty;
  empty.reference_loss = std::vector<double>{};
  const auto z = check_regret_bound(empty, s.reference, R, 2.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == doctest::Approx(u2 / 4.0));
  CHECK(z.holds);

  CHECK_THROWS(check_regret_bound(RegretTrace{}, s.reference, R, 1.0));
  CHECK(balanced_eta(3.0, 2.0, 8) == doctest::Approx(3.0 / (2.0 * 4.0)));
}

TEST_CASE("synthetic streams") {
  const auto a = small_stream(5, 500), b = small_stream(5, 500);
  CHECK(a.data.examples == b.data.examples);
  CHECK(a.reference.u == b.reference.u);
  CHECK(small_stream(6, 500).data.examples != a.data.examples);

  double ref_total = 0.0;
  for (const auto& ex : a.data.examples) {
    CHECK_FALSE(ex.x.empty());
    CHECK(predict(a.reference.u, ex.x) == ex.y);
    ref_total += loss_eval(a.reference.u, ex);
  }
  CHECK(ref_total == 0.0);

  const auto noisy = small_stream(5, 500, 0.2);
  std::size_t flips = 0;
  for (std::size_t t = 0; t < 500; ++t) flips += noisy.data.examples[t].y != a.data.examples[t].y;
  CHECK(flips > 0);

  SynthConfig bad;
  bad.density = 0;
  CHECK_THROWS(synth_stream(bad));
}

TEST_CASE("reference norm") {
  WeightMatrix u(1, 2);
  u.column(0)[0] = 3.0;
  u.threshold_column()[1] = 4.0;
  CHECK(ReferenceClassifier{u}.frobenius_norm() == 5.0);
}

TEST_CASE("salt bound report") {
  const auto s = small_stream(7);
  const auto rep = run_salt_with_bound(s.data, 0.5, 1.0, s.reference);
  CHECK(rep.trace.rounds() == 300);
  CHECK(rep.q > 0.0);
  CHECK(rep.history_norm_sum > 0.0);
  CHECK(rep.trace.regret_at(300) <= rep.rhs);
}

TEST_CASE("grid expansion") {
  GridSpec spec;
  spec.algo = Algo::falt_k;
  spec.etas = {0.5, 1.0};
  spec.m_multipliers = {0.5};
  spec.sigma2s = {1.0, 2.0, 4.0};
  spec.cs = {7.0, 8.0};
  const auto cfgs = expand_grid(spec, 6);
  CHECK(cfgs.size() == 6);
  CHECK(cfgs[0].max_learn == 3);
  spec.algo = Algo::pa1_br;
  CHECK(expand_grid(spec, 6).size() == 2);
  spec.etas.clear();
  CHECK_THROWS(expand_grid(spec, 6));
  spec.etas = {1.0};
  spec.folds = 1;
  CHECK_THROWS(expand_grid(spec, 6));
}

TEST_CASE("selection rule") {
  auto mk = [](double good, double bad) {
    MetricsReport r;
    r.precision = r.recall = r.f1 = r.macro_f1 = r.micro_f1 = good;
    r.hamming_loss = r.ranking_loss = bad;
    return r;
  };
  std::vector<MetricsReport> one{mk(0.5, 0.5)};
  CHECK(select_best(one) == 0);

  std::vector<MetricsReport> clear{mk(0.5, 0.5), mk(0.9, 0.1)};
  CHECK(select_best(clear) == 1);

  // Challenger wins 2, loses 5.
  auto mixed = mk(0.5, 0.5);
  mixed.hamming_loss = 0.1;
  mixed.ranking_loss = 0.1;
  std::vector<MetricsReport> lose{mk(0.6, 0.6), mixed};
  CHECK(select_best(lose) == 0);

  // Exact tie keeps the earlier index.
  std::vector<MetricsReport> tie{mk(0.5, 0.5), mk(0.5, 0.5)};
  CHECK(select_best(tie) == 0);

  // Equal win/loss counts fall back to F1.
  auto a = mk(0.5, 0.5), b = mk(0.5, 0.5);
  b.f1 = 0.6;
  b.precision = 0.6;
  b.recall = 0.6;
  b.macro_f1 = 0.4;
  b.micro_f1 = 0.4;
  b.hamming_loss = 0.5;
  b.ranking_loss = 0.6;
  std::vector<MetricsReport> f1_tie{a, b};
  const auto cmp = compare_reports(b, a);
  REQUIRE(cmp.better == cmp.worse);
  CHECK(select_best(f1_tie) == 1);
}

TEST_CASE("cross-validation search") {
  const auto s = small_stream(8, 200);
  GridSpec spec;
  spec.algo = Algo::falt;
  spec.etas = {0.5};
  spec.folds = 5;
  auto single = cv_grid_search(s.data, spec);
  CHECK(single.best == 0);
  CHECK(single.configs.size() == 1);
  CHECK(single.reports[0].n_examples == 200);

  spec.algo = Algo::falt_k;
  spec.etas = {0.25, 1.0};
  spec.sigma2s = {0.5, 4.0};
  spec.m_multipliers = {0.25, 1.0};
  const auto r1 = cv_grid_search(s.data, spec);
  const auto r2 = cv_grid_search(s.data, spec);
  spec.threads = 4;
  const auto r3 = cv_grid_search(s.data, spec);
  spec.threads = 1;
  spec.precompute_kernel = false;
  const auto r4 = cv_grid_search(s.data, spec);
  CHECK(r1.best == r2.best);
  CHECK(r1.best == r3.best);
  CHECK(r1.best == r4.best);
  for (std::size_t c = 0; c < r1.reports.size(); ++c) {
    CHECK(r1.reports[c].values() == r2.reports[c].values());
    CHECK(r1.reports[c].values() == r3.reports[c].values());
    for (std::size_t m = 0; m < 7; ++m) {
      CHECK(r1.reports[c].values()[m] == doctest::Approx(r4.reports[c].values()[m]).epsilon(1e-9));
    }
  }
}

TEST_CASE("fold folding matches a manual run") {
  const auto s = small_stream(9, 120);
  GridSpec spec;
  spec.algo = Algo::salt;
  spec.etas = {0.5};
  spec.deltas = {1.0};
  spec.folds = 4;
  spec.seed = 77;
  const auto res = cv_grid_search(s.data, spec);
  const auto folds = kfold_split(s.data, 4, 77);
  std::vector<MetricsReport> manual;
  for (const auto& f : folds) {
    SaltLearner l(4, 12, 0.5, 1.0, repeat_count(1.0, 4));
    for (auto i : f.train) l.learn(s.data.examples[i]);
    manual.push_back(evaluate(l, subset(s.data, f.validation)));
  }
  CHECK(res.reports[0].values() == average_reports(manual).values());
}

TEST_CASE("evaluation") {
  const auto s = small_stream(10, 400);
  Dataset train = subset(s.data, [] {
    std::vector<std::size_t> v(300);
    for (std::size_t i = 0; i < 300; ++i) v[i] = i;
    return v;
  }());
  Dataset test = subset(s.data, [] {
    std::vector<std::size_t> v(100);
    for (std::size_t i = 0; i < 100; ++i) v[i] = 300 + i;
    return v;
  }());

  LearnerConfig lin;
  lin.algo = Algo::falt;
  lin.eta = 0.2;
  lin.max_learn = 2;
  LearnerConfig ker = lin;
  ker.algo = Algo::falt_k;
  ker.kernel = {KernelKind::linear, 1.0};
  const auto ml = train_one_pass(lin, train);
  const auto mk = train_one_pass(ker, train);
  const auto before = snapshot(*mk);
  const auto rl = evaluate(*ml, test);
  const auto rk = evaluate(*mk, test);
  CHECK(snapshot(*mk) == before);
  CHECK(rl.values() == rk.values());
  CHECK(rl.per_label_confusion == rk.per_label_confusion);
  CHECK(rl.f1 > 0.5);

  Dataset wrong = test;
  wrong.features = 13;
  CHECK_THROWS_AS(evaluate(*ml, wrong), DimensionError);
}

TEST_CASE("replaying a separated stream makes no further updates") {
  const auto s = small_stream(11, 200);
  FaltLearner l(4, 12, {1.0, 1000});
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& ex : s.data.examples) {
      l.learn(ex);
      CHECK(l.loss(ex) == 0.0);
    }
  }
  std::size_t separated = 0;
  for (const auto& ex : s.data.examples) {
    const auto before = snapshot(l);
    const double loss = l.loss(ex);
    const auto r = l.learn(ex);
    if (loss == 0.0) {
      ++separated;
      CHECK(r.rounds_used == 0);
      CHECK(snapshot(l) == before);
    }
  }
  CHECK(separated > 0);
}
