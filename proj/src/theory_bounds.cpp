#include "xclust/theory_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>

#include "xclust/kernels.hpp"

namespace xclust {

double kl_bernoulli(double x, double y) {
  if (!(x > 0.0 && x < 1.0) || !(y > 0.0 && y < 1.0))
    fail(ErrorKind::InvalidInput, "KL divergence needs x and y in (0, 1)");
  return x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
}

const char* to_string(TailSide side) { return side == TailSide::Upper ? "upper" : "lower"; }
const char* to_string(BoundForm form) { return form == BoundForm::Kl ? "kl" : "simplified"; }

double binomial_bernoulli_tail_bound(std::size_t n, double q1, double q2, double r, TailSide side,
                                     BoundForm form) {
  if (!(q1 > 0.0 && q1 < 1.0) || !(q2 > 0.0 && q2 < 1.0))
    fail(ErrorKind::InvalidInput, "q1 and q2 must lie in (0, 1)");
  const double cap = side == TailSide::Upper ? 1.0 - q1 : q1;
  if (!(r > 0.0 && r < cap)) fail(ErrorKind::InvalidInput, "r out of range for this tail");
  const double divergence =
      form == BoundForm::Simplified ? 2.0 * r * r
                                    : kl_bernoulli(side == TailSide::Upper ? q1 + r : q1 - r, q1);
  return std::exp(static_cast<double>(n) * q2 * std::expm1(-divergence));
}

LargeDeviation large_deviation_rate(double x, double y, int k, double p_min, double r_a, double eps0) {
  if (!(x > 0.0) || !(y > 0.0)) fail(ErrorKind::InvalidInput, "x and y must be positive");
  if (k < 1) fail(ErrorKind::InvalidInput, "k must be at least 1");
  if (!(p_min > 0.0 && p_min <= 1.0)) fail(ErrorKind::InvalidInput, "p_min must lie in (0, 1]");
  if (!(r_a > 0.0 && r_a <= 1.0)) fail(ErrorKind::InvalidInput, "r_A must lie in (0, 1]");
  if (!(eps0 > 0.0)) fail(ErrorKind::InvalidInput, "eps0 must be positive");
  LargeDeviation out;
  out.c_k = static_cast<double>(std::max(k, 2) - 1);
  const double cap = p_min * eps0 / (k + eps0);
  out.first_branch = x < eps0 && y < out.c_k * cap;
  out.delta = out.first_branch ? std::max(y / out.c_k, p_min * x / (k + x)) : cap;
  out.rate = std::expm1(-2.0 * out.delta * out.delta);
  return out;
}

Epsilon0 epsilon0(std::span<const UnitPoint> atoms, const Dissimilarity& spec,
                  std::size_t resolution, Warnings* warnings, double tol) {
  Epsilon0 out;
  out.r_a = separation_radius(atoms, spec, resolution);
  auto holds = [&](double eps) { return out.r_a > eps + dual_radius(atoms, eps, spec, resolution).value; };
  double lo = std::min(1e-9, out.r_a / 2);
  if (!holds(lo)) {
    out.found = false;
    out.value = lo;
    out.lower = 0.0;
    out.upper = lo;
    warn(warnings, "no epsilon down to 1e-9 satisfies r_A > eps + r_A_dagger(eps) at this resolution");
    return out;
  }
  double hi = out.r_a;  // r_A > r_A + r† is impossible
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  out.value = lo;
  out.lower = lo;
  out.upper = hi;
  return out;
}

double false_selection_residual(int k, double p_min, double r_a, double t, double delta) {
  const double kd = static_cast<double>(k);
  const double lhs = std::pow(kd * (p_min - delta) * r_a, t) - kd * delta;
  double rhs = std::pow(kd * kd * delta, t);
  if (k >= 2) rhs = std::max(rhs, 1.0 - (p_min - delta) * r_a);
  return lhs - rhs;
}

FalseSelectionDelta false_selection_rate_delta(int k, double p_min, double r_a, double t) {
  if (k < 1) fail(ErrorKind::InvalidInput, "k must be at least 1");
  if (!(p_min > 0.0 && p_min <= 1.0)) fail(ErrorKind::InvalidInput, "p_min must lie in (0, 1]");
  if (!(r_a > 0.0 && r_a <= 1.0)) fail(ErrorKind::InvalidInput, "r_A must lie in (0, 1]");
  if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorKind::InvalidInput, "t must be positive");
  double lo = 0.0;
  double hi = p_min;
  // the residual is decreasing in delta
  if (!(false_selection_residual(k, p_min, r_a, t, lo) > 0.0) ||
      !(false_selection_residual(k, p_min, r_a, t, hi) < 0.0))
    fail(ErrorKind::Domain, "no sign change of the delta_t equation on (0, p_min); t is outside (0, t0)");
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (false_selection_residual(k, p_min, r_a, t, mid) > 0.0 ? lo : hi) = mid;
  }
  const double rlo = false_selection_residual(k, p_min, r_a, t, lo);
  const double rhi = false_selection_residual(k, p_min, r_a, t, hi);
  FalseSelectionDelta out;
  out.delta = std::abs(rlo) <= std::abs(rhi) ? lo : hi;
  out.residual = std::min(std::abs(rlo), std::abs(rhi));
  out.rate = std::expm1(-2.0 * out.delta * out.delta);
  return out;
}

bool large_deviation_event(const SpectralEstimate& est, const SpectralEstimate& truth, double x,
                           double y, const Dissimilarity& spec) {
  const std::size_t k = truth.k();
  if (est.k() != k) fail(ErrorKind::InvalidInput, "estimate and truth differ in order");
  if (k > 8) fail(ErrorKind::Guard, "the deviation event is evaluated exhaustively for k <= 8 only");
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool close = true;
    for (std::size_t i = 0; i < k && close; ++i) {
      const auto j = static_cast<std::size_t>(perm[i]);
      close = spec(est.atoms[j].coords(), truth.atoms[i].coords()) <= x &&
              std::abs(est.probs[j] - truth.probs[i]) <= y;
    }
    if (close) return false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return true;
}

double clopper_pearson_lower(std::size_t hits, std::size_t trials, double level) {
  if (trials == 0) fail(ErrorKind::InvalidInput, "no trials");
  if (hits == 0) return 0.0;
  return boost::math::binomial_distribution<>::find_lower_bound_on_p(
      static_cast<double>(trials), static_cast<double>(hits), level);
}

namespace {

BoundReport finish_report(std::string kind, std::vector<std::pair<std::string, double>> parameters,
                          double analytic, std::size_t hits, std::size_t replicates) {
  BoundReport r;
  r.kind = std::move(kind);
  r.parameters = std::move(parameters);
  r.analytic_bound = analytic;
  r.replicates = replicates;
  r.hits = hits;
  r.empirical = static_cast<double>(hits) / static_cast<double>(replicates);
  r.empirical_lower = clopper_pearson_lower(hits, replicates);
  r.pass = r.empirical_lower <= analytic;
  return r;
}

}  // namespace

BoundReport monte_carlo_validate(std::string kind,
                                 std::vector<std::pair<std::string, double>> parameters,
                                 double analytic, const std::function<bool(std::uint64_t)>& trial,
                                 std::size_t replicates, std::uint64_t seed) {
  if (replicates < 1000) fail(ErrorKind::InvalidInput, "Monte Carlo validation needs at least 1000 replicates");
  std::size_t hits = 0;
  const auto reps = static_cast<std::ptrdiff_t>(replicates);
#pragma omp parallel for schedule(dynamic) reduction(+ : hits)
  for (std::ptrdiff_t i = 0; i < reps; ++i)
    if (trial(derive_seed(seed, static_cast<std::uint64_t>(i)))) ++hits;
  BoundReport r = finish_report(std::move(kind), std::move(parameters), analytic, hits, replicates);
  r.status = "asymptotic trend";
  return r;
}

BoundReport validate_tail_bound(std::size_t n, double q1, double q2, double r, TailSide side,
                                std::size_t replicates, std::uint64_t seed) {
  if (replicates < 1000) fail(ErrorKind::InvalidInput, "Monte Carlo validation needs at least 1000 replicates");
  const double bound = binomial_bernoulli_tail_bound(n, q1, q2, r, side, BoundForm::Kl);
  kernels::BinomialBernoulliEvent event{n, q1, q2, side == TailSide::Upper ? q1 + r : q1 - r,
                                        side == TailSide::Upper};
  const std::size_t hits = kernels::count_binomial_bernoulli(event, replicates, seed);
  BoundReport report = finish_report(
      std::string("binomial-bernoulli-") + to_string(side),
      {{"n", static_cast<double>(n)}, {"q1", q1}, {"q2", q2}, {"r", r}}, bound, hits, replicates);
  report.status = "finite-sample inequality";
  return report;
}

}  // namespace xclust
