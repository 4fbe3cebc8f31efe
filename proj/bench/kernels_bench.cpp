// Serial vs OpenMP kernels. Arg(1) selects the parallel version.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "xclust/geometry.hpp"
#include "xclust/kernels.hpp"

using namespace xclust;
using namespace xclust::kernels;

namespace {

Matrix random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::exponential_distribution<double> e(1.0);
  Matrix m(0, d);
  std::vector<double> v(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& x : v) x = e(rng);
    m.append_row(project_to_sphere(v, NormSpec::p_norm(2.0)).coords());
  }
  return m;
}

void BM_NearestTwo(benchmark::State& state) {
  const Matrix points = random_rows(20000, 6, 1);
  const Matrix centers = random_rows(6, 6, 2);
  const auto cos = Dissimilarity::cosine();
  NearestTwo out;
  for (auto _ : state) {
    if (state.range(0)) nearest_two(points, centers, cos, out);
    else nearest_two_serial(points, centers, cos, out);
    benchmark::DoNotOptimize(out.first.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(points.rows()));
}

void BM_GridMaxAbsDiff(benchmark::State& state) {
  const Matrix design = sphere_design(3, 200000, NormSpec::p_norm(2.0), 3);
  const Matrix w = random_rows(2, 3, 4);
  const auto pc = Dissimilarity::principal_component();
  for (auto _ : state) {
    const double v = state.range(0) ? grid_max_abs_diff(design, w.row(0), w.row(1), pc)
                                    : grid_max_abs_diff_serial(design, w.row(0), w.row(1), pc);
    benchmark::DoNotOptimize(v);
  }
}

void BM_GridMinMax(benchmark::State& state) {
  const Matrix design = sphere_design(3, 200000, NormSpec::p_norm(2.0), 5);
  const Matrix w = random_rows(2, 3, 6);
  const auto cos = Dissimilarity::cosine();
  for (auto _ : state) {
    const double v = state.range(0) ? grid_min_max(design, w.row(0), w.row(1), cos)
                                    : grid_min_max_serial(design, w.row(0), w.row(1), cos);
    benchmark::DoNotOptimize(v);
  }
}

void BM_SimulateFactorRows(benchmark::State& state) {
  const Matrix b = random_rows(10, 6, 7);
  FactorSampler s{&b, 1.0, Mixing::Max};
  for (auto _ : state) {
    Matrix x = state.range(0) ? simulate_factor_rows(s, 100000, 8) : simulate_factor_rows_serial(s, 100000, 8);
    benchmark::DoNotOptimize(x.data().data());
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}

void BM_CountBinomialBernoulli(benchmark::State& state) {
  const BinomialBernoulliEvent ev{1000, 0.5, 0.1, 0.6, true};
  for (auto _ : state) {
    const std::size_t c = state.range(0) ? count_binomial_bernoulli(ev, 100000, 9)
                                         : count_binomial_bernoulli_serial(ev, 100000, 9);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}

}  // namespace

BENCHMARK(BM_NearestTwo)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GridMaxAbsDiff)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GridMinMax)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SimulateFactorRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountBinomialBernoulli)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
