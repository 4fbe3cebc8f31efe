#pragma once

// Simplified average silhouette width, the small-cluster / close-center
// penalty and order selection by the penalized score.

#include <vector>

#include "xclust/clustering.hpp"
#include "xclust/core.hpp"
#include "xclust/geometry.hpp"

namespace xclust {

struct SilhouetteBreakdown {
  std::vector<double> a_values;  // per occurrence, nearest-center dissimilarity
  std::vector<double> b_values;  // per occurrence, second-nearest (1 when k = 1)
  double asw = 0.0;
  double penalty = 0.0;
  double s_t = 0.0;
  double t = 0.0;
  double min_cluster_fraction = 1.0;       // min_i |C_i| k / |W|
  double min_center_dissimilarity = 1.0;   // 1 when k = 1
};

/// 1 − |W|⁻¹ Σ m(w) a(w)/b(w). An occurrence with b(w) = 0 (coinciding
/// centers) contributes a/b := 1.
double asw(const WeightedMultiset& w, const Clustering& clustering, const Dissimilarity& spec);

/// min_i |C_i| k / |W|.
double min_cluster_fraction(const WeightedMultiset& w, const Clustering& clustering);
/// min_{i<j} D(a_i, a_j), 1 when k = 1.
double min_center_dissimilarity(const Clustering& clustering, const Dissimilarity& spec);

/// P_t = 1 − (min cluster fraction)^t (min center dissimilarity)^t; P_0 = 0.
double penalty(const WeightedMultiset& w, const Clustering& clustering, const Dissimilarity& spec,
               double t);

SilhouetteBreakdown penalized_asw(const WeightedMultiset& w, const Clustering& clustering,
                                  const Dissimilarity& spec, double t);

std::vector<double> default_t_grid();

struct OrderSelectionReport {
  std::vector<int> m_range;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> scores;  // [m][t]
  std::vector<double> asw;                  // per m
  std::vector<std::vector<double>> penalties;  // [m][t]
  std::vector<double> min_cluster_fraction;      // per m
  std::vector<double> min_center_dissimilarity;  // per m
  std::vector<double> objective;                 // per m
  std::vector<bool> degenerate;                  // per m
  std::vector<int> selected_order_per_t;
  std::vector<Clustering> clusterings;  // per m
};

/// One seeded clustering per m (seed derive_seed(config.seed, m)), scored
/// for every t. Orders above |W| are dropped with a warning. The selected
/// order maximizes S_t, lowest m on ties.
OrderSelectionReport select_order(const WeightedMultiset& w, const Dissimilarity& spec,
                                  std::vector<int> m_range, const std::vector<double>& t_grid,
                                  const ClusterConfig& config, Warnings* warnings = nullptr);

/// t₀ = ln(1 − r_A p_min) / ln(r_A k p_min); needs r_A k p_min < 1.
double t_upper_bound(double r_a, double p_min, int k);

/// Δ_t = (r_A k p_min)^t − 1 + r_A p_min.
double delta_t(double r_a, double p_min, int k, double t);

}  // namespace xclust
