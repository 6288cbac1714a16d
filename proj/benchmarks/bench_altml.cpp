#include <benchmark/benchmark.h>

#include <random>

#include "altml/harness.hpp"
#include "altml/kernel.hpp"
#include "altml/linear_learners.hpp"
#include "altml/metrics.hpp"

using namespace altml;

namespace {

Dataset stream(std::size_t d, std::size_t labels, std::size_t T, double density) {
  SynthConfig c;
  c.d = d;
  c.labels = labels;
  c.T = T;
  c.density = density;
  c.noise_p = 0.05;
  c.margin_rescale = false;
  c.seed = 3;
  return synth_stream(c).data;
}

void BM_SparseDot(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto ds = stream(d, 1, 64, static_cast<double>(d) / 10);
  std::vector<double> col(d, 0.5);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sparse_dot(ds.examples[k++ & 63].x, col));
  }
}
BENCHMARK(BM_SparseDot)->Arg(100)->Arg(1000)->Arg(10000);

void BM_FaltRound(benchmark::State& state) {
  const auto labels = static_cast<std::size_t>(state.range(0));
  const auto ds = stream(300, labels, 512, 30);
  WeightMatrix w(labels, 300);
  const FaltConfig cfg{0.1, 1};
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(falt_round(w, ds.examples[k++ & 511], cfg));
  }
}
BENCHMARK(BM_FaltRound)->Arg(6)->Arg(14)->Arg(100);

void BM_SaltRound(benchmark::State& state) {
  const auto labels = static_cast<std::size_t>(state.range(0));
  const auto ds = stream(300, labels, 512, 30);
  WeightMatrix w(labels, 300);
  SaltState st(labels, 300, 0.5, 1.0, 1);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(salt_round(w, st, ds.examples[k++ & 511]));
  }
}
BENCHMARK(BM_SaltRound)->Arg(6)->Arg(14)->Arg(100);

void BM_KScore(benchmark::State& state) {
  const auto support = static_cast<std::size_t>(state.range(0));
  const auto ds = stream(100, 6, support + 64, 20);
  KernelModel m(KernelDescriptor{KernelKind::rbf, 2.0}, 6, 100);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> row(7);
  for (std::size_t k = 0; k < support; ++k) {
    for (auto& v : row) v = g(rng);
    m.add_support(ds.examples[k].x, row);
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kscore(m, ds.examples[support + (k++ & 63)].x));
  }
}
BENCHMARK(BM_KScore)->Arg(100)->Arg(1000)->Arg(5000);

void BM_KfaltPassWithGram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ds = stream(100, 6, n, 20);
  const KernelDescriptor k{KernelKind::rbf, 2.0};
  const GramMatrix gram(ds, k);
  for (auto _ : state) {
    KernelModel m(k, 6, 100);
    for (std::size_t i = 0; i < n; ++i) {
      kfalt_round(m, ds.examples[i], {0.5, 3}, {&gram, static_cast<std::int64_t>(i)});
    }
    benchmark::DoNotOptimize(m.support_size());
  }
}
BENCHMARK(BM_KfaltPassWithGram)->Arg(500)->Arg(2000);

void BM_ComputeMetrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ds = stream(50, 14, n, 10);
  FaltLearner l(14, 50, {0.3, 2});
  for (const auto& ex : ds.examples) l.learn(ex);
  const auto records = evaluation_records(l, ds);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_metrics(records));
  }
}
BENCHMARK(BM_ComputeMetrics)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
