#include "xclust/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace xclust::kernels {

namespace {

// Below this many rows the thread start-up cost dominates.
constexpr std::size_t kParallelThreshold = 2048;

inline void nearest_two_row(std::span<const double> w, const Matrix& centers,
                            const Dissimilarity& dissim, int& nearest, double& first,
                            double& second) {
  const std::size_t k = centers.rows();
  nearest = 0;
  first = std::numeric_limits<double>::infinity();
  second = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double v = dissim(w, centers.row(c));
    if (v < first) {
      second = first;
      first = v;
      nearest = static_cast<int>(c);
    } else if (v < second) {
      second = v;
    }
  }
  if (k == 1) second = 1.0;
}

void resize(NearestTwo& out, std::size_t n) {
  out.nearest.resize(n);
  out.first.resize(n);
  out.second.resize(n);
}

}  // namespace

void nearest_two_serial(const Matrix& points, const Matrix& centers,
                        const Dissimilarity& dissim, NearestTwo& out) {
  resize(out, points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i)
    nearest_two_row(points.row(i), centers, dissim, out.nearest[i], out.first[i],
                    out.second[i]);
}

void nearest_two(const Matrix& points, const Matrix& centers, const Dissimilarity& dissim,
                 NearestTwo& out) {
  const std::size_t n = points.rows();
  resize(out, n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < rows; ++i)
    nearest_two_row(points.row(i), centers, dissim, out.nearest[i], out.first[i],
                    out.second[i]);
}

double grid_max_abs_diff_serial(const Matrix& design, std::span<const double> w1,
                                std::span<const double> w2, const Dissimilarity& dissim) {
  double best = 0.0;
  for (std::size_t i = 0; i < design.rows(); ++i) {
    const auto u = design.row(i);
    best = std::max(best, std::abs(dissim(u, w1) - dissim(u, w2)));
  }
  return best;
}

double grid_max_abs_diff(const Matrix& design, std::span<const double> w1,
                         std::span<const double> w2, const Dissimilarity& dissim) {
  double best = 0.0;
  const auto rows = static_cast<std::ptrdiff_t>(design.rows());
#pragma omp parallel for schedule(static) reduction(max : best) if (design.rows() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto u = design.row(i);
    best = std::max(best, std::abs(dissim(u, w1) - dissim(u, w2)));
  }
  return best;
}

double grid_min_max_serial(const Matrix& design, std::span<const double> a,
                           std::span<const double> b, const Dissimilarity& dissim) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < design.rows(); ++i) {
    const auto u = design.row(i);
    best = std::min(best, std::max(dissim(u, a), dissim(u, b)));
  }
  return best;
}

double grid_min_max(const Matrix& design, std::span<const double> a, std::span<const double> b,
                    const Dissimilarity& dissim) {
  double best = std::numeric_limits<double>::infinity();
  const auto rows = static_cast<std::ptrdiff_t>(design.rows());
#pragma omp parallel for schedule(static) reduction(min : best) if (design.rows() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto u = design.row(i);
    best = std::min(best, std::max(dissim(u, a), dissim(u, b)));
  }
  return best;
}

namespace {

void simulate_chunk(const FactorSampler& s, Matrix& out, std::size_t begin, std::size_t end,
                    std::uint64_t seed) {
  const Matrix& b = *s.coefficients;
  const std::size_t d = b.rows();
  const std::size_t k = b.cols();
  Rng rng(seed);
  std::vector<double> z(k);
  const double inv_alpha = -1.0 / s.alpha;
  for (std::size_t r = begin; r < end; ++r) {
    for (std::size_t j = 0; j < k; ++j) z[j] = std::pow(-std::log(uniform_open(rng)), inv_alpha);
    auto x = out.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      double v = 0.0;
      if (s.mixing == Mixing::Max) {
        for (std::size_t j = 0; j < k; ++j) v = std::max(v, b(i, j) * z[j]);
      } else {
        for (std::size_t j = 0; j < k; ++j) v += b(i, j) * z[j];
      }
      x[i] = v;
    }
    if (s.noise_alpha > 0.0) {
      const double inv_noise = -1.0 / s.noise_alpha;
      for (std::size_t i = 0; i < d; ++i) {
        const double eps = s.noise_scale * std::pow(-std::log(uniform_open(rng)), inv_noise);
        x[i] = s.mixing == Mixing::Max ? std::max(x[i], eps) : x[i] + eps;
      }
    }
  }
}

}  // namespace

Matrix simulate_factor_rows_serial(const FactorSampler& sampler, std::size_t n,
                                   std::uint64_t seed) {
  Matrix out(n, sampler.coefficients->rows());
  const std::size_t chunks = (n + kSimulationChunk - 1) / kSimulationChunk;
  for (std::size_t c = 0; c < chunks; ++c)
    simulate_chunk(sampler, out, c * kSimulationChunk, std::min(n, (c + 1) * kSimulationChunk),
                   derive_seed(seed, c));
  return out;
}

Matrix simulate_factor_rows(const FactorSampler& sampler, std::size_t n, std::uint64_t seed) {
  Matrix out(n, sampler.coefficients->rows());
  const auto chunks = static_cast<std::ptrdiff_t>((n + kSimulationChunk - 1) / kSimulationChunk);
#pragma omp parallel for schedule(dynamic) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    simulate_chunk(sampler, out, cc * kSimulationChunk, std::min(n, (cc + 1) * kSimulationChunk),
                   derive_seed(seed, cc));
  }
  return out;
}

namespace {

std::size_t count_chunk(const BinomialBernoulliEvent& e, std::size_t reps, std::uint64_t seed) {
  Rng rng(seed);
  std::binomial_distribution<std::size_t> trials(e.n, e.q2);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::size_t n = trials(rng);
    double mean = 0.0;
    if (n > 0) {
      std::binomial_distribution<std::size_t> successes(n, e.q1);
      mean = static_cast<double>(successes(rng)) / static_cast<double>(n);
    }
    if (e.upper ? mean > e.level : mean < e.level) ++hits;
  }
  return hits;
}

}  // namespace

std::size_t count_binomial_bernoulli_serial(const BinomialBernoulliEvent& event,
                                            std::size_t replicates, std::uint64_t seed) {
  std::size_t hits = 0;
  const std::size_t chunks = (replicates + kMonteCarloChunk - 1) / kMonteCarloChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t reps = std::min(kMonteCarloChunk, replicates - c * kMonteCarloChunk);
    hits += count_chunk(event, reps, derive_seed(seed, c));
  }
  return hits;
}

std::size_t count_binomial_bernoulli(const BinomialBernoulliEvent& event,
                                     std::size_t replicates, std::uint64_t seed) {
  std::size_t hits = 0;
  const auto chunks =
      static_cast<std::ptrdiff_t>((replicates + kMonteCarloChunk - 1) / kMonteCarloChunk);
#pragma omp parallel for schedule(dynamic) reduction(+ : hits) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    const std::size_t reps = std::min(kMonteCarloChunk, replicates - cc * kMonteCarloChunk);
    hits += count_chunk(event, reps, derive_seed(seed, cc));
  }
  return hits;
}

}  // namespace xclust::kernels
