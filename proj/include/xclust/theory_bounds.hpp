#pragma once

// Closed-form tail bounds and large-deviation rates for clustering-based
// estimation, plus Monte Carlo harnesses that check them.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xclust/core.hpp"
#include "xclust/extremes.hpp"
#include "xclust/geometry.hpp"

namespace xclust {

/// x ln(x/y) + (1−x) ln((1−x)/(1−y)) for x, y in (0, 1).
double kl_bernoulli(double x, double y);

enum class TailSide { Upper, Lower };
enum class BoundForm { Kl, Simplified };

const char* to_string(TailSide side);
const char* to_string(BoundForm form);

/// Bound on P(mean of B_1..B_N > q1 + r) (upper) or P(mean < q1 − r) (lower)
/// for N ~ Bin(n, q2) and B_i ~ Bernoulli(q1), the empty mean read as 0:
/// exp{n q2 (e^{−KL(q1 ± r ‖ q1)} − 1)}, or exp{n q2 (e^{−2r²} − 1)} in the
/// simplified form.
double binomial_bernoulli_tail_bound(std::size_t n, double q1, double q2, double r, TailSide side,
                                     BoundForm form);

struct LargeDeviation {
  double delta = 0.0;  // Δ(x, y)
  double rate = 0.0;   // exp(−2Δ²) − 1
  double c_k = 1.0;    // (k ∨ 2) − 1
  bool first_branch = false;
};

/// Δ(x, y): max{y/c_k, p_min x/(k + x)} when x < ε₀ and y < c_k p_min ε₀/(k + ε₀),
/// otherwise p_min ε₀/(k + ε₀). Branch boundaries fall in the second case.
LargeDeviation large_deviation_rate(double x, double y, int k, double p_min, double r_a, double eps0);

struct Epsilon0 {
  double value = 0.0;  // largest ε found with r_A > ε + r_A†(ε)
  double r_a = 0.0;
  double lower = 0.0;  // last ε known to satisfy the inequality
  double upper = 0.0;  // first ε known to violate it
  bool found = true;
};

/// ε₀ = sup{ε > 0 : r_A > ε + r_A†(ε)} by bisection on (0, r_A), stopping
/// once the bracket is narrower than `tol`. When no ε down to 1e-9
/// qualifies the result carries found = false and a warning.
Epsilon0 epsilon0(std::span<const UnitPoint> atoms, const Dissimilarity& spec,
                  std::size_t resolution, Warnings* warnings = nullptr, double tol = 1e-6);

/// [k(p−δ)r]^t − kδ − max{(k²δ)^t, (1 − (p−δ)r) 1{k≥2}}.
double false_selection_residual(int k, double p_min, double r_a, double t, double delta);

struct FalseSelectionDelta {
  double delta = 0.0;
  double rate = 0.0;  // exp(−2δ²) − 1
  double residual = 0.0;
};

/// Root δ_t in (0, p_min) of false_selection_residual by bisection. No sign
/// change on the interval is a domain error.
FalseSelectionDelta false_selection_rate_delta(int k, double p_min, double r_a, double t);

/// E(x, y): no bijection matches every estimated atom within D-distance x and
/// every mass within y. Exhaustive over permutations, k <= 8.
bool large_deviation_event(const SpectralEstimate& est, const SpectralEstimate& truth, double x,
                           double y, const Dissimilarity& spec);

struct BoundReport {
  std::string kind;
  std::vector<std::pair<std::string, double>> parameters;
  double analytic_bound = 0.0;
  std::optional<double> empirical;
  std::size_t replicates = 0;
  std::size_t hits = 0;
  /// One-sided 99% Clopper–Pearson lower limit of the event probability.
  double empirical_lower = 0.0;
  bool pass = false;
  /// "finite-sample inequality" or "asymptotic trend"
  std::string status;
};

/// Lower 1 − level Clopper–Pearson limit for hits out of trials.
double clopper_pearson_lower(std::size_t hits, std::size_t trials, double level = 0.01);

/// Runs `trial(derive_seed(seed, i))` for i < replicates (concurrently) and
/// compares the event frequency with `analytic`: pass when the 99% lower limit
/// does not exceed the bound.
BoundReport monte_carlo_validate(std::string kind,
                                 std::vector<std::pair<std::string, double>> parameters,
                                 double analytic, const std::function<bool(std::uint64_t)>& trial,
                                 std::size_t replicates, std::uint64_t seed);

/// The binomial–Bernoulli tail event against its KL-form bound.
BoundReport validate_tail_bound(std::size_t n, double q1, double q2, double r, TailSide side,
                                std::size_t replicates, std::uint64_t seed);

}  // namespace xclust
