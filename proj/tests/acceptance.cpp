// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 2 5        run a subset
//
// The exit status is nonzero on an exception, or on any FAIL when
// XCLUST_ACCEPTANCE_STRICT is set.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "xclust/clustering.hpp"
#include "xclust/extremes.hpp"
#include "xclust/factor_models.hpp"
#include "xclust/order_selection.hpp"
#include "xclust/pipeline.hpp"
#include "xclust/theory_bounds.hpp"

using namespace xclust;
using namespace xclust::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const Dissimilarity kCos = Dissimilarity::cosine();
const Dissimilarity kPc = Dissimilarity::principal_component();

// ---- 1: penalty improves order identification on d4k2

Verdict penalty_bias_correction() {
  ReproduceConfig cfg;
  cfg.scheme = Scheme::D4K2;
  cfg.replicates = 30;
  cfg.n = 10000;
  cfg.top = 1000;
  cfg.t_grid = {0.0, 0.05, 0.1, 0.2};
  cfg.seed = 1;
  const ReproduceResult r = reproduce(cfg);
  bool pass = true;
  std::ostringstream d;
  for (std::size_t a = 0; a < r.algorithms.size(); ++a) {
    const auto& rates = r.success_rate[a];
    const double best = *std::max_element(rates.begin() + 1, rates.end());
    pass = pass && best >= rates[0] && best >= 0.8;
    d << r.algorithms[a] << " t=0 " << fmt(rates[0], 3) << " best t>0 " << fmt(best, 3) << "; ";
  }

  // the same replicates on a finer grid of small t, for context only
  ReproduceConfig fine = cfg;
  fine.t_grid = {0.0, 0.001, 0.002, 0.005, 0.01};
  const ReproduceResult f = reproduce(fine);
  d << "finer grid {0,0.001,0.002,0.005,0.01}:";
  for (std::size_t a = 0; a < f.algorithms.size(); ++a) {
    d << ' ' << f.algorithms[a];
    for (double v : f.success_rate[a]) d << ' ' << fmt(v, 3);
  }
  return {pass, d.str()};
}

// ---- 2: score gap at t = t0 / 2

Verdict silhouette_gap() {
  // the best separated of the first 100 seeded d4k2 models
  FactorCoefficients model;
  SpectralEstimate truth;
  double r_a = -1.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const FactorCoefficients m = random_model(Scheme::D4K2, s).model;
    const SpectralEstimate sp = spectral_from_coefficients(m, kTwo, kTwo);
    const double r = separation_radius(sp.atoms, kCos, 4096);
    if (r > r_a) {
      r_a = r;
      model = m;
      truth = sp;
    }
  }
  const double p_min = *std::min_element(truth.probs.begin(), truth.probs.end());
  const int k = 2;
  const double t0 = t_upper_bound(r_a, p_min, k);
  const double t = 0.5 * t0;
  const double target = delta_t(r_a, p_min, k, t) - 0.05;

  SubsampleConfig sub;
  sub.alpha = 1.0;
  sub.set_selection("ell:1000");
  int ok = 0;
  std::vector<double> gaps;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DataMatrix data = simulate(model, 100000, derive_seed(100, s));
    const auto w = extract_extremal_subsample(data, sub);
    ClusterConfig cc;
    cc.seed = s;
    const auto rep = select_order(w, kCos, {1, 2, 3, 4, 5, 6}, {t}, cc);
    double other = -1e9, own = 0.0;
    for (std::size_t i = 0; i < rep.m_range.size(); ++i) {
      if (rep.m_range[i] == k) own = rep.scores[i][0];
      else other = std::max(other, rep.scores[i][0]);
    }
    gaps.push_back(own - other);
    ok += own - other >= target;
  }
  std::ostringstream d;
  d << ok << "/20 runs with gap >= Delta_t - 0.05 (r_A " << fmt(r_a) << ", p_min " << fmt(p_min) << ", t0 "
    << fmt(t0) << ", Delta_t " << fmt(target + 0.05) << ", median gap " << fmt(median(gaps)) << ")";
  return {ok >= 18, d.str()};
}

// ---- 3: consistency ladder on d6k6

Verdict consistency_ladder() {
  const FactorCoefficients model = random_model(Scheme::D6K6, 3).model;
  const SpectralEstimate truth = spectral_from_coefficients(model, kTwo, kTwo);
  std::vector<double> atom_med, prob_med;
  for (double n : {1e3, 1e4, 1e5}) {
    SubsampleConfig sub;
    sub.alpha = 1.0;
    sub.set_selection("ell:" + std::to_string(static_cast<long>(std::lround(std::pow(n, 0.7)))));
    std::vector<double> atom, prob;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const DataMatrix data = simulate(model, static_cast<std::size_t>(n), derive_seed(300, s));
      const auto w = extract_extremal_subsample(data, sub);
      ClusterConfig cc;
      cc.seed = s;
      const AtomMatch m = match_atoms(estimate_spectral(w, 6, kCos, cc), truth, kCos);
      atom.push_back(m.max_atom_error);
      prob.push_back(m.max_prob_error);
    }
    atom_med.push_back(median(atom));
    prob_med.push_back(median(prob));
  }
  const bool pass = atom_med[0] > atom_med[1] && atom_med[1] > atom_med[2] && prob_med[0] > prob_med[1] &&
                    prob_med[1] > prob_med[2] && atom_med[2] < 0.05 && prob_med[2] < 0.03;
  std::ostringstream d;
  d << "median max atom error " << fmt(atom_med[0]) << " > " << fmt(atom_med[1]) << " > " << fmt(atom_med[2])
    << ", median max mass error " << fmt(prob_med[0]) << " > " << fmt(prob_med[1]) << " > " << fmt(prob_med[2]);
  return {pass, d.str()};
}

// ---- 4: coefficient recovery

Verdict factor_recovery() {
  double inversion = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const FactorCoefficients m = random_model(static_cast<Scheme>(s % 4), s).model;
    const NormSpec a = NormSpec::p_norm(m.alpha);
    const Matrix back = coefficients_from_spectral(spectral_from_coefficients(m, a, a), m.alpha, m.d());
    for (std::size_t i = 0; i < back.data().size(); ++i)
      inversion = std::max(inversion, std::abs(back.data()[i] - m.b.data()[i]));
  }
  const FactorCoefficients truth = random_model(Scheme::D4K2, 4).model;
  PipelineConfig p;
  p.subsample.alpha = 1.0;
  p.subsample.norm_r = NormSpec::p_norm(1.0);
  p.subsample.norm_s = kTwo;
  p.subsample.set_selection("frac:0.1");
  const FitRun fit = run_fit(simulate(truth, 100000, 41), p, 2);
  const double err = match_columns(fit.coefficients.b, truth.b).max_entry_error;
  std::ostringstream d;
  d << "exact inversion max error " << fmt(inversion, 3) << " over 100 models; d4k2 recovery at n=1e5 max entry error "
    << fmt(err);
  return {inversion <= 1e-10 && err < 0.05, d.str()};
}

// ---- 5: binomial-Bernoulli tail bound by Monte Carlo

Verdict tail_bound_validation() {
  struct Point {
    std::size_t n;
    double q1, q2, r;
    TailSide side;
  };
  const std::vector<Point> grid{
      {1000, 0.5, 0.1, 0.1, TailSide::Upper},  {1000, 0.5, 0.1, 0.1, TailSide::Lower},
      {200, 0.3, 0.5, 0.1, TailSide::Upper},   {200, 0.3, 0.5, 0.1, TailSide::Lower},
      {500, 0.2, 0.2, 0.05, TailSide::Upper},  {100, 0.7, 0.9, 0.1, TailSide::Lower},
      {50, 0.5, 0.5, 0.2, TailSide::Upper},    {2000, 0.1, 0.05, 0.05, TailSide::Upper},
      {300, 0.6, 0.3, 0.15, TailSide::Lower},  {20, 0.5, 0.8, 0.3, TailSide::Upper}};
  int ok = 0, ordered = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point& g = grid[i];
    const BoundReport r = validate_tail_bound(g.n, g.q1, g.q2, g.r, g.side, 100000, derive_seed(500, i));
    ok += r.pass;
    worst = std::max(worst, *r.empirical / r.analytic_bound);
    ordered += binomial_bernoulli_tail_bound(g.n, g.q1, g.q2, g.r, g.side, BoundForm::Kl) <=
               binomial_bernoulli_tail_bound(g.n, g.q1, g.q2, g.r, g.side, BoundForm::Simplified);
  }
  std::ostringstream d;
  d << ok << "/10 grid points pass at 99%, kl <= simplified on " << ordered
    << "/10, largest empirical/bound ratio " << fmt(worst, 3);
  return {ok == 10 && ordered == 10, d.str()};
}

// ---- 6: clustering inequalities on constructed multisets

struct InequalityCounts {
  int instances = 0;
  int m_less = 0, m_less_ok = 0;
  int center = 0, center_ok = 0;
  int more = 0, more_ok = 0, more_vacuous = 0;
  int equal = 0, equal_ok = 0, equal_vacuous = 0;

  bool all_hold() const {
    return m_less_ok == m_less && center_ok == center && more_ok == more && equal_ok == equal;
  }
  std::string summary() const {
    std::ostringstream s;
    s << "m<k " << m_less_ok << '/' << m_less << ", centers " << center_ok << '/' << center << ", m>k " << more_ok
      << '/' << more << " (" << more_vacuous << " vacuous), m=k " << equal_ok << '/' << equal << " ("
      << equal_vacuous << " vacuous)";
    return s.str();
  }
};

/// Atoms well inside the orthant, with r_A above `min_r`.
std::vector<UnitPoint> separated_atoms(Rng& rng, std::size_t d, int k, double min_r, const Dissimilarity& spec) {
  for (;;) {
    std::vector<UnitPoint> atoms;
    for (int i = 0; i < k; ++i) {
      std::vector<double> v(d, 0.05);
      v[static_cast<std::size_t>(i) % d] = 1.0;
      atoms.push_back(jitter(rng, project_to_sphere(v, kTwo), 0.15));
    }
    if (separation_radius(atoms, spec, 1024) > min_r) return atoms;
  }
}

/// A point in B_D(center, eps): jittered copies of the center until one lands inside.
UnitPoint inside(Rng& rng, const UnitPoint& center, double eps, const Dissimilarity& spec) {
  double spread = std::sqrt(eps);
  for (int tries = 0;; ++tries) {
    const UnitPoint w = jitter(rng, center, spread);
    if (spec(w.coords(), center.coords()) < eps) return w;
    if (tries % 20 == 19) spread *= 0.5;
  }
}

void inequality_instance(std::uint64_t seed, double eps, double delta, const Dissimilarity& spec, InequalityCounts& c) {
  constexpr double tol = 1e-2;
  constexpr std::size_t res = 2048;
  Rng rng(seed);
  const int k = 2 + static_cast<int>(seed % 2);
  const std::size_t d = 3;
  const auto atoms = separated_atoms(rng, d, k, std::max(0.1, 2 * eps), spec);
  std::vector<double> p(static_cast<std::size_t>(k));
  for (auto& v : p) v = 0.5 + uniform_open(rng);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;
  const double p_min = *std::min_element(p.begin(), p.end());

  // (p_i - delta) N points in each ball, the remaining k delta N anywhere
  const std::size_t n = 400;
  Matrix rows(0, d);
  std::size_t used = 0;
  for (int i = 0; i < k; ++i) {
    const auto cnt = static_cast<std::size_t>(std::ceil((p[static_cast<std::size_t>(i)] - delta) * n - 1e-9));
    for (std::size_t j = 0; j < cnt; ++j) rows.append_row(inside(rng, atoms[static_cast<std::size_t>(i)], eps, spec).coords());
    used += cnt;
  }
  for (; used < n; ++used) rows.append_row(random_point(rng, d).coords());
  const WeightedMultiset w = WeightedMultiset::from_rows(rows, kTwo);

  const double r_a = separation_radius(atoms, spec, res);
  auto dual = [&](double s) { return dual_radius(atoms, s, spec, res).value; };
  const double r_eps = dual(eps);
  const double eps_p = ((1 - k * delta) * eps + k * delta) / (p_min - delta) + r_eps;
  const double r_eps_p = eps_p < 1.0 ? dual(eps_p) : 1.0;
  ++c.instances;

  ClusterConfig cc;
  cc.restarts = 30;
  cc.seed = seed;
  for (int m = 1; m <= k + 2; ++m) {
    const Clustering cl = k_cluster(w, m, spec, cc);
    const double s = asw(w, cl, spec);
    if (m < k) {
      ++c.m_less;
      c.m_less_ok += s <= 1 - (p_min - delta) * (r_a - r_eps) + tol;
      continue;
    }
    ++c.center;
    bool close = true;
    for (const auto& a : atoms) {
      double best = 1.0;
      for (const auto& ctr : cl.centers) best = std::min(best, spec(ctr.coords(), a.coords()));
      close = close && best < eps_p + tol;
    }
    c.center_ok += close;
    if (m > k) {
      ++c.more;
      if (!(eps_p < r_a)) {
        ++c.more_vacuous;
        ++c.more_ok;
        continue;
      }
      double frac = 1.0;
      for (int sz : cl.sizes) frac = std::min(frac, static_cast<double>(sz) / static_cast<double>(w.size()));
      c.more_ok += frac <= k * delta + tol ||
                   min_center_dissimilarity(cl, spec) <= eps_p + 2 * r_eps + r_eps_p + tol;
    } else {
      ++c.equal;
      if (!(r_a > eps_p + 2 * r_eps + r_eps_p)) {
        ++c.equal_vacuous;
        ++c.equal_ok;
        continue;
      }
      const double lower = 1 - (1 - k * delta) * (eps_p + r_eps) / (r_a - r_eps - r_eps_p) - k * delta;
      SpectralEstimate est = spectral_from_clustering(cl);
      SpectralEstimate truth{atoms, p};
      const AtomMatch match = match_atoms(est, truth, spec);
      bool sizes_ok = true;
      for (std::size_t i = 0; i < atoms.size(); ++i)
        sizes_ok = sizes_ok && est.probs[static_cast<std::size_t>(match.permutation[i])] >= p[i] - delta - tol;
      c.equal_ok += s >= lower - tol && sizes_ok && min_center_dissimilarity(cl, spec) >= r_a - 2 * r_eps_p - tol;
    }
  }
}

Verdict inequality_suite() {
  InequalityCounts main_suite;
  for (std::uint64_t s = 0; s < 50; ++s) inequality_instance(600 + s, 0.05, 0.02, s % 2 ? kPc : kCos, main_suite);
  // the same checks where every hypothesis is satisfiable
  InequalityCounts tight;
  for (std::uint64_t s = 0; s < 50; ++s) inequality_instance(700 + s, 1e-4, 1e-4, kCos, tight);
  std::ostringstream d;
  d << "eps=0.05 delta=0.02: " << main_suite.summary() << "; eps=delta=1e-4: " << tight.summary();
  const bool nonvacuous = tight.equal_vacuous < tight.equal && tight.more_vacuous < tight.more;
  return {main_suite.all_hold() && tight.all_hold() && nonvacuous, d.str()};
}

// ---- 7: clustering oracle

Verdict oracle_equivalence() {
  int within = 0, below = 0;
  double worst = 0.0;
  ClusterConfig cc;
  cc.restarts = 50;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(derive_seed(700, s));
    const std::size_t support = 3 + s % 5;
    const WeightedMultiset w = random_multiset(rng, 3, support);
    const int k = 1 + static_cast<int>(s % 3);
    const auto& spec = s % 2 ? kPc : kCos;
    cc.seed = s;
    const double got = k_cluster(w, k, spec, cc).objective;
    const double oracle = brute_force_k_cluster(w, k, spec).objective;
    within += std::abs(got - oracle) <= 1e-6;
    below += got <= oracle + 1e-6;
    worst = std::max(worst, got - oracle);
  }
  std::ostringstream d;
  d << within << "/100 within 1e-6 of the oracle, " << below << "/100 at or below it, worst excess " << fmt(worst, 3);
  return {within == 100, d.str()};
}

// ---- 8: closed forms

Verdict closed_forms() {
  struct Check {
    const char* name;
    double got, expected, tol;
  };
  const double t0 = t_upper_bound(0.29289, 0.5, 2);
  const FalseSelectionDelta half = false_selection_rate_delta(2, 0.5, 0.29289, 0.5 * t0);
  const FalseSelectionDelta near = false_selection_rate_delta(2, 0.5, 0.29289, 0.99 * t0);
  const std::vector<Check> checks{
      {"t0(0.29289,0.5,2)", t0, 0.1289500754426180484, 1e-9},
      {"t0(0.5,0.2,3)", t_upper_bound(0.5, 0.2, 3), 0.0875107106068016, 1e-9},
      {"Delta_t(t=0.05)", delta_t(0.29289, 0.5, 2, 0.05), 0.0868939528203242704, 1e-9},
      {"Delta_t(t0)", delta_t(0.29289, 0.5, 2, t0), 0.0, 1e-12},
      {"delta_t(t0/2)", half.delta, 0.0270611503867016299, 1e-9},
      {"delta_t(0.99 t0)", near.delta, 0.000538626106856304420, 1e-9},
      {"Delta(x,y)", large_deviation_rate(0.1, 0.001, 2, 0.4, 0.3, 0.2).delta, 0.0190476190476190476, 1e-9},
      {"kl(0.6,0.5)", kl_bernoulli(0.6, 0.5), 0.0201355135506889, 1e-9},
      {"simplified bound", binomial_bernoulli_tail_bound(1000, 0.5, 0.1, 0.1, TailSide::Upper, BoundForm::Simplified),
       0.1380509210, 1e-9},
  };
  int ok = 0;
  std::string bad;
  for (const auto& c : checks) {
    if (std::abs(c.got - c.expected) <= c.tol) ++ok;
    else bad += std::string(" ") + c.name + "=" + fmt(c.got, 12);
  }
  const bool residual = std::abs(half.residual) < 1e-10 && std::abs(near.residual) < 1e-10;
  std::ostringstream d;
  d << ok << '/' << checks.size() << " values within tolerance, delta_t residuals " << fmt(std::abs(half.residual), 2)
    << ' ' << fmt(std::abs(near.residual), 2) << bad;
  return {ok == static_cast<int>(checks.size()) && residual, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"penalty bias correction (d4k2, 30 replicates)", penalty_bias_correction},
      {"score gap at t0/2 (d4k2, n=1e5, 20 seeds)", silhouette_gap},
      {"consistency ladder (d6k6, 20 seeds)", consistency_ladder},
      {"coefficient recovery", factor_recovery},
      {"tail bound Monte Carlo (10 points, 1e5 replicates)", tail_bound_validation},
      {"clustering inequality suite (50 multisets)", inequality_suite},
      {"clustering oracle (100 instances)", oracle_equivalence},
      {"closed forms", closed_forms},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      std::cout << "criterion " << id << " ERROR " << criteria[i].first << ": " << e.what() << std::endl;
      return 1;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::cout << "criterion " << id << ' ' << (v.pass ? "PASS" : "FAIL") << ' ' << criteria[i].first << ": "
              << v.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
  }
  const char* strict = std::getenv("XCLUST_ACCEPTANCE_STRICT");
  return failed > 0 && strict != nullptr && *strict != '\0' ? 2 : 0;
}
