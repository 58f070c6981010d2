// Parallel kernels against their serial references.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include "entineq/catalog.hpp"
#include "entineq/reference.hpp"

#include <benchmark/benchmark.h>

using namespace entineq;

namespace {

Datum falsifier_datum() {
  Datum d;
  d.n = {6, 6};
  d.c = {1.0, 1.0};
  d.p = {6};
  d.d = {2.0};
  Mat b = Mat::Zero(6, 12);
  b.leftCols(6).setIdentity();
  b.rightCols(6).setIdentity();
  d.B = {b / std::sqrt(2.0)};
  return d;
}

Datum wide_geometric() {
  Rng rng(5);
  catalog::RandomGeometricOptions o;
  o.max_k = 4;
  o.max_frames = 4;
  o.max_maps = 12;
  Datum best = catalog::random_geometric(rng, o);
  for (int t = 0; t < 50; ++t) {
    Datum d = catalog::random_geometric(rng, o);
    if (d.m() * d.total_dim() > best.m() * best.total_dim()) best = d;
  }
  return best;
}

ProductDistribution mixture_input() {
  std::vector<Component> comps;
  for (double m : {-2.0, 0.0, 3.0}) {
    Vec mu(2);
    mu << m, 0.0;
    comps.push_back({1.0 / 3, mu, PdMat::identity(2)});
  }
  return ProductDistribution{{GaussianMixture(comps), GaussianMixture::standard(1)}};
}

void BM_dimension_parallel(benchmark::State& state) {
  const Datum d = falsifier_datum();
  for (auto _ : state) benchmark::DoNotOptimize(dimension_check_sampled(d, 2000, 1));
}
void BM_dimension_serial(benchmark::State& state) {
  const Datum d = falsifier_datum();
  for (auto _ : state) benchmark::DoNotOptimize(reference::dimension_check(d, 2000, 1));
}

void BM_independent_parallel(benchmark::State& state) {
  const Datum d = wide_geometric();
  for (auto _ : state) benchmark::DoNotOptimize(independent_subspaces(d));
}
void BM_independent_serial(benchmark::State& state) {
  const Datum d = wide_geometric();
  for (auto _ : state) benchmark::DoNotOptimize(reference::independent_subspaces(d));
}

void BM_deficit_parallel(benchmark::State& state) {
  const Datum d = catalog::toy(0.5);
  const ProductDistribution x = mixture_input();
  for (auto _ : state) benchmark::DoNotOptimize(entropy_deficit(d, x, 0.0, McSettings{100000, 20, 1}));
}
void BM_deficit_serial(benchmark::State& state) {
  const Datum d = catalog::toy(0.5);
  const ProductDistribution x = mixture_input();
  for (auto _ : state) benchmark::DoNotOptimize(reference::entropy_deficit(d, x, 0.0, McSettings{100000, 20, 1}));
}

void BM_lemma_parallel(benchmark::State& state) {
  const Datum d = catalog::shannon_stam(0.5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lemma_battery(d, 1000, 1));
}
void BM_lemma_serial(benchmark::State& state) {
  const Datum d = catalog::shannon_stam(0.5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::lemma_battery(d, 1000, 1));
}

}  // namespace

BENCHMARK(BM_dimension_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dimension_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_independent_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_independent_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_deficit_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_deficit_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lemma_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lemma_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
