#include <doctest.h>

#include <cmath>
#include <random>

#include "altml/errors.hpp"
#include "altml/kernel.hpp"
#include "altml/linear_learners.hpp"
#include "../support/fixtures.hpp"

using namespace altml;
namespace tf = altml::testing;

namespace {

const KernelDescriptor kLinear{KernelKind::linear, 1.0};

WeightMatrix reconstruct(const KernelModel& m) {
  WeightMatrix w(m.labels(), m.dim());
  for (std::size_t k = 0; k < m.support_size(); ++k) {
    const auto row = m.alpha_row(k);
    for (std::size_t i = 0; i < m.row_width(); ++i) scaled_add(w.column(i), row[i], m.support()[k]);
  }
  return w;
}

}  // namespace

TEST_CASE("rbf kernel values") {
  const KernelDescriptor rbf{KernelKind::rbf, 0.5};
  const SparseVector a(3, {0, 2}, {1.0, -1.0});
  const SparseVector b(3, {1}, {2.0});
  CHECK(kernel_eval(rbf, a, a) == 1.0);
  CHECK(kernel_eval(rbf, a, b) == kernel_eval(rbf, b, a));
  // ‖a − c‖² = 1 = 2σ²
  const SparseVector c(3, {0}, {1.0});
  CHECK(kernel_eval(rbf, a, c) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(kernel_eval(rbf, a, c) == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(kernel_eval(kLinear, a, b) == 0.0);
  CHECK(kernel_eval(kLinear, a, c) == 1.0);
  CHECK_THROWS_AS(kernel_eval(rbf, a, SparseVector(4)), DimensionError);
}

TEST_CASE("rbf values lie in (0, 1]") {
  std::mt19937_64 rng(3);
  const KernelDescriptor rbf{KernelKind::rbf, 2.0};
  for (int t = 0; t < 500; ++t) {
    auto a = tf::random_sparse(rng, 10), b = tf::random_sparse(rng, 10);
    const double k = kernel_eval(rbf, a, b);
    CHECK(k > 0.0);
    CHECK(k <= 1.0);
  }
}

TEST_CASE("kernel descriptor validation and names") {
  CHECK_THROWS(KernelDescriptor{KernelKind::rbf, 0.0}.validate());
  CHECK_NOTHROW(KernelDescriptor{KernelKind::linear, 0.0}.validate());
  CHECK(kernel_kind_from_string("rbf") == KernelKind::rbf);
  CHECK(to_string(KernelKind::linear) == "linear");
  CHECK_THROWS(kernel_kind_from_string("poly"));
}

TEST_CASE("kscore hand cases") {
  KernelModel m(kLinear, 2, 2);
  auto empty = kscore(m, SparseVector(2, {0}, {1.0}));
  CHECK(empty.label_scores == std::vector<double>{0.0, 0.0});
  CHECK(empty.threshold_score == 0.0);

  const std::vector<double> row{1.0, -1.0, 0.0};
  m.add_support(SparseVector(2, {0}, {1.0}), row);
  // κ = ⟨(1,0), (0.5,0)⟩ = 0.5
  auto s = kscore(m, SparseVector(2, {0}, {0.5}));
  CHECK(s.label_scores == std::vector<double>{0.5, -0.5});
  CHECK(s.threshold_score == 0.0);

  const std::vector<double> zeros{0.0, 0.0, 0.0};
  m.add_support(SparseVector(2, {1}, {1.0}), zeros);
  CHECK(m.support_size() == 1);
}

TEST_CASE("linear-kernel scores equal the reconstructed weight matrix") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    const std::size_t L = 3, d = 9;
    KernelModel m(kLinear, L, d);
    for (int k = 0; k < 12; ++k) {
      std::vector<double> row(L + 1);
      for (auto& v : row) v = g(rng);
      m.add_support(tf::random_sparse(rng, d), row);
    }
    const auto w = reconstruct(m);
    const auto x = tf::random_sparse(rng, d);
    const auto ks = kscore(m, x), ls = score(w, x);
    for (std::size_t i = 0; i < L; ++i) CHECK(std::abs(ks.label_scores[i] - ls.label_scores[i]) < 1e-9);
    CHECK(std::abs(ks.threshold_score - ls.threshold_score) < 1e-9);
  }
}

TEST_CASE("kscore is linear in the coefficients") {
  std::mt19937_64 rng(7);
  const KernelDescriptor rbf{KernelKind::rbf, 1.5};
  const auto sv = tf::random_sparse(rng, 6);
  const auto x = tf::random_sparse(rng, 6);
  KernelModel a(rbf, 2, 6), b(rbf, 2, 6);
  a.add_support(sv, std::vector<double>{1.0, 2.0, -1.0});
  b.add_support(sv, std::vector<double>{3.0, 6.0, -3.0});
  const auto sa = kscore(a, x), sb = kscore(b, x);
  for (std::size_t i = 0; i < 2; ++i) CHECK(sb.label_scores[i] == doctest::Approx(3 * sa.label_scores[i]));
  CHECK(sb.threshold_score == doctest::Approx(3 * sa.threshold_score));
}

TEST_CASE("kfalt hand example") {
  KernelModel m(KernelDescriptor{KernelKind::rbf, 1.0}, 2, 1);
  const Example ex{SparseVector(1, {0}, {1.0}), LabelSet(2, {0})};
  auto r = kfalt_round(m, ex, {0.5, 1});
  CHECK(r.rounds_used == 1);
  CHECK(r.loss_before == 2.0);
  REQUIRE(m.support_size() == 1);
  const auto row = m.alpha_row(0);
  CHECK(row[0] == 0.5);
  CHECK(row[1] == -0.5);
  CHECK(row[2] == 0.0);
}

TEST_CASE("kfalt support growth") {
  std::mt19937_64 rng(9);
  KernelModel m(KernelDescriptor{KernelKind::rbf, 1.0}, 3, 5);
  for (int t = 0; t < 200; ++t) {
    const Example ex{tf::random_sparse(rng, 5), tf::random_labels(rng, 3)};
    const auto before = m.support_size();
    const double loss = loss_from_scores(kscore(m, ex.x), ex.y);
    auto r = kfalt_round(m, ex, {0.5, 4});
    CHECK(r.loss_before == loss);
    if (loss == 0.0) {
      CHECK(m.support_size() == before);
      CHECK(r.rounds_used == 0);
    } else {
      CHECK(m.support_size() == before + 1);
    }
  }
}

TEST_CASE("kfalt coefficients are the negated scaled loss coefficients") {
  std::mt19937_64 rng(11);
  KernelModel m(KernelDescriptor{KernelKind::rbf, 2.0}, 4, 6);
  const double eta = 0.3;
  for (int t = 0; t < 100; ++t) {
    const Example ex{tf::random_sparse(rng, 6), tf::random_labels(rng, 4)};
    const auto terms = loss_terms(kscore(m, ex.x), ex.y);
    const auto before = m.support_size();
    kfalt_round(m, ex, {eta, 1});
    if (m.support_size() == before) continue;
    const auto row = m.alpha_row(m.support_size() - 1);
    for (std::size_t i = 0; i < 5; ++i) CHECK(row[i] == -eta * terms.coeffs[i]);
  }
}

TEST_CASE("linear-kernel kfalt tracks linear falt round by round") {
  std::mt19937_64 rng(13);
  for (int max_learn : {1, 3}) {
    const std::size_t L = 5, d = 20;
    WeightMatrix w(L, d);
    KernelModel m(kLinear, L, d);
    const FaltConfig cfg{0.2, max_learn};
    for (int t = 0; t < 300; ++t) {
      const Example ex{tf::random_sparse(rng, d, 0.4), tf::random_labels(rng, L)};
      const auto ls = score(w, ex.x), ks = kscore(m, ex.x);
      CHECK(predict_from_scores(ls) == predict_from_scores(ks));
      for (std::size_t i = 0; i < L; ++i) CHECK(std::abs(ls.label_scores[i] - ks.label_scores[i]) < 1e-9);
      auto rl = falt_round(w, ex, cfg);
      auto rk = kfalt_round(m, ex, cfg);
      CHECK(rl.rounds_used == rk.rounds_used);
    }
  }
}

TEST_CASE("gram matrix lookups agree with direct evaluation") {
  std::mt19937_64 rng(17);
  Dataset ds;
  ds.labels = 3;
  ds.features = 8;
  for (int i = 0; i < 40; ++i) ds.examples.push_back({tf::random_sparse(rng, 8), tf::random_labels(rng, 3)});
  const KernelDescriptor rbf{KernelKind::rbf, 0.75};
  const GramMatrix gram(ds, rbf);
  CHECK(gram.size() == 40);
  CHECK(gram.at(3, 7) == kernel_eval(rbf, ds.examples[3].x, ds.examples[7].x));

  KernelModel direct(rbf, 3, 8), cached(rbf, 3, 8);
  const FaltConfig cfg{0.5, 2};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    kfalt_round(direct, ds.examples[i], cfg);
    kfalt_round(cached, ds.examples[i], cfg, {&gram, static_cast<std::int64_t>(i)});
  }
  REQUIRE(direct.support_size() == cached.support_size());
  for (std::size_t k = 0; k < direct.alphas().size(); ++k) {
    CHECK(direct.alphas()[k] == doctest::Approx(cached.alphas()[k]).epsilon(1e-12));
  }
  CHECK(cached.support_ids().back() >= 0);
}
