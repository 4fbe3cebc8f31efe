#include <doctest.h>

#include <omp.h>

#include "support.hpp"
#include "xclust/kernels.hpp"

using namespace xclust;
using namespace xclust::testing;

namespace {

Matrix random_rows(Rng& rng, std::size_t n, std::size_t d) {
  Matrix m(0, d);
  for (std::size_t i = 0; i < n; ++i) m.append_row(random_point(rng, d).coords());
  return m;
}

}  // namespace

TEST_CASE("nearest_two matches its serial twin") {
  omp_set_num_threads(4);
  Rng rng(1);
  const Matrix pts = random_rows(rng, 5000, 4);
  for (int k : {1, 3, 7}) {
    const Matrix centers = random_rows(rng, static_cast<std::size_t>(k), 4);
    for (const auto& spec : {Dissimilarity::cosine(), Dissimilarity::principal_component()}) {
      kernels::NearestTwo a, b;
      kernels::nearest_two(pts, centers, spec, a);
      kernels::nearest_two_serial(pts, centers, spec, b);
      CHECK(a.nearest == b.nearest);
      CHECK(a.first == b.first);
      CHECK(a.second == b.second);
      if (k == 1) {
        for (double s : a.second) CHECK(s == 1.0);
      }
    }
  }
}

TEST_CASE("nearest_two breaks ties to the lowest index") {
  Matrix centers(0, 2);
  centers.append_row(axis(2, 0).coords());
  centers.append_row(axis(2, 1).coords());
  Matrix pts(0, 2);
  pts.append_row(unit({1, 1}).coords());
  kernels::NearestTwo out;
  kernels::nearest_two_serial(pts, centers, Dissimilarity::cosine(), out);
  CHECK(out.nearest[0] == 0);
  CHECK(out.first[0] == out.second[0]);
}

TEST_CASE("grid kernels match their serial twins") {
  omp_set_num_threads(4);
  const Matrix design = sphere_design(5, 10000, kTwo);
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    const UnitPoint a = random_point(rng, 5), b = random_point(rng, 5);
    for (const auto& spec : {Dissimilarity::cosine(), Dissimilarity::principal_component()}) {
      CHECK(kernels::grid_max_abs_diff(design, a.coords(), b.coords(), spec) ==
            kernels::grid_max_abs_diff_serial(design, a.coords(), b.coords(), spec));
      CHECK(kernels::grid_min_max(design, a.coords(), b.coords(), spec) ==
            kernels::grid_min_max_serial(design, a.coords(), b.coords(), spec));
    }
  }
}

TEST_CASE("factor simulation is thread-count independent") {
  Matrix b(3, 2);
  b(0, 0) = 0.3; b(0, 1) = 0.7;
  b(1, 0) = 0.5; b(1, 1) = 0.5;
  b(2, 0) = 0.9; b(2, 1) = 0.1;
  for (auto mixing : {kernels::Mixing::Max, kernels::Mixing::Sum}) {
    kernels::FactorSampler s{&b, 1.0, mixing, 2.0, 0.5};
    omp_set_num_threads(1);
    const Matrix one = kernels::simulate_factor_rows(s, 10000, 99);
    omp_set_num_threads(4);
    const Matrix four = kernels::simulate_factor_rows(s, 10000, 99);
    const Matrix serial = kernels::simulate_factor_rows_serial(s, 10000, 99);
    CHECK(one == four);
    CHECK(four == serial);
  }
}

TEST_CASE("binomial-Bernoulli counting is thread-count independent") {
  const kernels::BinomialBernoulliEvent e{1000, 0.5, 0.1, 0.6, true};
  omp_set_num_threads(4);
  const auto par = kernels::count_binomial_bernoulli(e, 20000, 5);
  const auto ser = kernels::count_binomial_bernoulli_serial(e, 20000, 5);
  CHECK(par == ser);
  CHECK(par < 20000);
  // N = 0 always: the empty mean is 0, never above 0.6 and always below it
  const kernels::BinomialBernoulliEvent none_up{0, 0.5, 0.1, 0.6, true};
  CHECK(kernels::count_binomial_bernoulli_serial(none_up, 5000, 1) == 0);
  const kernels::BinomialBernoulliEvent none_down{0, 0.5, 0.1, 0.4, false};
  CHECK(kernels::count_binomial_bernoulli_serial(none_down, 5000, 1) == 5000);
}
