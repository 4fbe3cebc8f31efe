#include "xclust/order_selection.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "xclust/kernels.hpp"

namespace xclust {

namespace {

void check_clustering(const WeightedMultiset& w, const Clustering& c) {
  if (w.size() == 0) fail(ErrorKind::InvalidInput, "empty multiset");
  if (c.centers.empty()) fail(ErrorKind::InvalidInput, "clustering has no centers");
  if (c.sizes.size() != c.centers.size() || c.labels.size() != w.size())
    fail(ErrorKind::InvalidInput, "clustering does not belong to this multiset");
}

void silhouette_terms(const WeightedMultiset& w, const Clustering& c, const Dissimilarity& spec,
                      std::vector<double>* a_out, std::vector<double>* b_out, double& asw_out) {
  check_clustering(w, c);
  kernels::NearestTwo nt;
  kernels::nearest_two(w.support(), centers_matrix(c.centers), spec, nt);
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < w.support_size(); ++i) {
    const double a = nt.first[i];
    const double b = nt.second[i];
    const double ratio = b > 0.0 ? a / b : 1.0;
    ratio_sum += w.multiplicity(i) * ratio;
    if (a_out != nullptr)
      for (int m = 0; m < w.multiplicity(i); ++m) {
        a_out->push_back(a);
        b_out->push_back(b);
      }
  }
  asw_out = 1.0 - ratio_sum / static_cast<double>(w.size());
}

}  // namespace

double asw(const WeightedMultiset& w, const Clustering& clustering, const Dissimilarity& spec) {
  double out = 0.0;
  silhouette_terms(w, clustering, spec, nullptr, nullptr, out);
  return out;
}

double min_cluster_fraction(const WeightedMultiset& w, const Clustering& clustering) {
  check_clustering(w, clustering);
  const int smallest = *std::min_element(clustering.sizes.begin(), clustering.sizes.end());
  return static_cast<double>(smallest) * static_cast<double>(clustering.k()) / static_cast<double>(w.size());
}

double min_center_dissimilarity(const Clustering& clustering, const Dissimilarity& spec) {
  double out = 1.0;
  const auto& c = clustering.centers;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) out = std::min(out, spec(c[i].coords(), c[j].coords()));
  return out;
}

namespace {

double penalty_from(double frac, double dissim, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::InvalidInput, "t must be a finite nonnegative number");
  return 1.0 - std::pow(frac, t) * std::pow(dissim, t);
}

}  // namespace

double penalty(const WeightedMultiset& w, const Clustering& clustering, const Dissimilarity& spec,
               double t) {
  return penalty_from(min_cluster_fraction(w, clustering), min_center_dissimilarity(clustering, spec), t);
}

SilhouetteBreakdown penalized_asw(const WeightedMultiset& w, const Clustering& clustering,
                                  const Dissimilarity& spec, double t) {
  SilhouetteBreakdown out;
  silhouette_terms(w, clustering, spec, &out.a_values, &out.b_values, out.asw);
  out.t = t;
  out.min_cluster_fraction = min_cluster_fraction(w, clustering);
  out.min_center_dissimilarity = min_center_dissimilarity(clustering, spec);
  out.penalty = penalty_from(out.min_cluster_fraction, out.min_center_dissimilarity, t);
  out.s_t = out.asw - out.penalty;
  return out;
}

std::vector<double> default_t_grid() { return {0.0, 0.02, 0.05, 0.1, 0.2, 0.3}; }

OrderSelectionReport select_order(const WeightedMultiset& w, const Dissimilarity& spec,
                                  std::vector<int> m_range, const std::vector<double>& t_grid,
                                  const ClusterConfig& config, Warnings* warnings) {
  if (w.size() == 0) fail(ErrorKind::InvalidInput, "empty multiset");
  if (t_grid.empty()) fail(ErrorKind::InvalidInput, "t grid is empty");
  for (double t : t_grid)
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::InvalidInput, "t values must be finite and nonnegative");
  std::set<int> unique(m_range.begin(), m_range.end());
  m_range.clear();
  for (int m : unique) {
    if (m < 1) fail(ErrorKind::InvalidInput, "candidate orders must be positive");
    if (static_cast<std::size_t>(m) > w.size()) {
      warn(warnings, "order " + std::to_string(m) + " exceeds |W| = " + std::to_string(w.size()) + " and is skipped");
      continue;
    }
    m_range.push_back(m);
  }
  if (m_range.empty()) fail(ErrorKind::InvalidInput, "no candidate order fits the subsample");

  OrderSelectionReport r;
  r.m_range = m_range;
  r.t_grid = t_grid;
  const std::size_t nm = m_range.size();
  r.clusterings.resize(nm);
  std::vector<Warnings> local(nm);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(nm); ++idx) {
    const auto i = static_cast<std::size_t>(idx);
    ClusterConfig cfg = config;
    cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(m_range[i]));
    r.clusterings[i] = k_cluster(w, m_range[i], spec, cfg, &local[i]);
  }
  for (auto& l : local)
    for (auto& msg : l) warn(warnings, std::move(msg));

  r.scores.assign(nm, std::vector<double>(t_grid.size()));
  r.penalties.assign(nm, std::vector<double>(t_grid.size()));
  for (std::size_t i = 0; i < nm; ++i) {
    const Clustering& c = r.clusterings[i];
    r.asw.push_back(asw(w, c, spec));
    r.min_cluster_fraction.push_back(min_cluster_fraction(w, c));
    r.min_center_dissimilarity.push_back(min_center_dissimilarity(c, spec));
    r.objective.push_back(c.objective);
    r.degenerate.push_back(c.degenerate_order);
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      r.penalties[i][j] = penalty_from(r.min_cluster_fraction[i], r.min_center_dissimilarity[i], t_grid[j]);
      r.scores[i][j] = r.asw[i] - r.penalties[i][j];
    }
  }
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < nm; ++i)
      if (r.scores[i][j] > r.scores[best][j]) best = i;
    r.selected_order_per_t.push_back(m_range[best]);
  }
  return r;
}

namespace {

void check_constants(double r_a, double p_min, int k) {
  if (!(r_a > 0.0 && r_a <= 1.0)) fail(ErrorKind::InvalidInput, "r_A must lie in (0, 1]");
  if (!(p_min > 0.0 && p_min <= 1.0)) fail(ErrorKind::InvalidInput, "p_min must lie in (0, 1]");
  if (k < 1) fail(ErrorKind::InvalidInput, "k must be at least 1");
}

}  // namespace

double t_upper_bound(double r_a, double p_min, int k) {
  check_constants(r_a, p_min, k);
  const double base = r_a * k * p_min;
  if (!(base < 1.0)) fail(ErrorKind::InvalidInput, "t0 needs r_A k p_min < 1");
  if (!(r_a * p_min < 1.0)) fail(ErrorKind::InvalidInput, "t0 needs r_A p_min < 1");
  return std::log1p(-r_a * p_min) / std::log(base);
}

double delta_t(double r_a, double p_min, int k, double t) {
  check_constants(r_a, p_min, k);
  if (!(t >= 0.0)) fail(ErrorKind::InvalidInput, "t must be nonnegative");
  return std::pow(r_a * k * p_min, t) - 1.0 + r_a * p_min;
}

}  // namespace xclust
