#pragma once

// Data-parallel inner loops. Every OpenMP kernel has a serial twin that
// produces bit-identical output; the serial versions are the reference used by
// the tests and the baseline of the benchmark target.
//
// Stochastic kernels split their work into fixed-size chunks, each with its own
// derived seed, so the result does not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xclust/core.hpp"
#include "xclust/geometry.hpp"

namespace xclust::kernels {

/// Per-point nearest center, its dissimilarity and the second-smallest
/// dissimilarity over the remaining centers (1 when there is a single center).
/// Ties go to the lowest center index.
struct NearestTwo {
  std::vector<int> nearest;
  std::vector<double> first;
  std::vector<double> second;
};

void nearest_two_serial(const Matrix& points, const Matrix& centers,
                        const Dissimilarity& dissim, NearestTwo& out);
void nearest_two(const Matrix& points, const Matrix& centers, const Dissimilarity& dissim,
                 NearestTwo& out);

/// max over design rows u of |D(u, w1) − D(u, w2)|.
double grid_max_abs_diff_serial(const Matrix& design, std::span<const double> w1,
                                std::span<const double> w2, const Dissimilarity& dissim);
double grid_max_abs_diff(const Matrix& design, std::span<const double> w1,
                         std::span<const double> w2, const Dissimilarity& dissim);

/// min over design rows u of max(D(u, a), D(u, b)).
double grid_min_max_serial(const Matrix& design, std::span<const double> a,
                           std::span<const double> b, const Dissimilarity& dissim);
double grid_min_max(const Matrix& design, std::span<const double> a, std::span<const double> b,
                    const Dissimilarity& dissim);

enum class Mixing { Max, Sum };

struct FactorSampler {
  const Matrix* coefficients = nullptr;  // d × k, nonnegative
  double alpha = 1.0;
  Mixing mixing = Mixing::Max;
  double noise_alpha = 0.0;  // 0 disables the additive / maxed noise term
  double noise_scale = 1.0;
};

inline constexpr std::size_t kSimulationChunk = 4096;

/// Draws n rows of X = B Z (sum) or B ⊙ Z (max) with i.i.d. standard
/// α-Fréchet factors Z = (−ln U)^{−1/α}.
Matrix simulate_factor_rows_serial(const FactorSampler& sampler, std::size_t n,
                                   std::uint64_t seed);
Matrix simulate_factor_rows(const FactorSampler& sampler, std::size_t n, std::uint64_t seed);

struct BinomialBernoulliEvent {
  std::size_t n = 0;   // binomial trials for N
  double q1 = 0.5;     // Bernoulli success probability
  double q2 = 0.5;     // binomial success probability
  double level = 0.5;  // compared against the sample mean of B_1..B_N
  bool upper = true;   // event {mean > level} when true, {mean < level} otherwise
};

inline constexpr std::size_t kMonteCarloChunk = 4096;

/// Number of replicates in which the event occurs, with mean := 0 when N = 0.
std::size_t count_binomial_bernoulli_serial(const BinomialBernoulliEvent& event,
                                            std::size_t replicates, std::uint64_t seed);
std::size_t count_binomial_bernoulli(const BinomialBernoulliEvent& event,
                                     std::size_t replicates, std::uint64_t seed);

}  // namespace xclust::kernels
