#pragma once

// k-clustering of a finite multiset on the sphere: nearest-center assignment
// with empty-cluster repair, optimal center updates for the built-in
// dissimilarities, seeded Lloyd iteration with restarts, and an exhaustive
// small-instance oracle.

#include <cstdint>
#include <span>
#include <vector>

#include "xclust/core.hpp"
#include "xclust/geometry.hpp"

namespace xclust {

/// A multiset on the sphere stored as its support (rows of a matrix, no two
/// rows within 1e-12 of each other) with positive multiplicities. Occurrences
/// are numbered consecutively by support index.
class WeightedMultiset {
 public:
  WeightedMultiset() = default;

  /// Rows of `points` must already lie on the `sphere` unit sphere; coinciding
  /// rows are merged into one support point in first-occurrence order.
  static WeightedMultiset from_rows(const Matrix& points, const NormSpec& sphere);
  static WeightedMultiset from_points(std::span<const UnitPoint> points,
                                      std::span<const int> multiplicities);

  std::size_t support_size() const noexcept { return points_.rows(); }
  /// |W|, the number of occurrences.
  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t dim() const noexcept { return points_.cols(); }
  const NormSpec& sphere_norm() const noexcept { return sphere_; }

  std::span<const double> point(std::size_t i) const { return points_.row(i); }
  UnitPoint unit_point(std::size_t i) const;
  int multiplicity(std::size_t i) const { return mult_[i]; }
  const std::vector<int>& multiplicities() const noexcept { return mult_; }
  const Matrix& support() const noexcept { return points_; }

  /// Occurrences of support point i are [offset(i), offset(i + 1)).
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t support_index(std::size_t occurrence) const;

 private:
  void finish();

  Matrix points_;
  std::vector<int> mult_;
  std::vector<std::size_t> offsets_;
  NormSpec sphere_;
};

/// Per-occurrence center labels plus cluster sizes.
struct Assignment {
  std::vector<int> labels;
  std::vector<int> sizes;
};

struct ClusterConfig {
  int restarts = 10;
  int max_iter = 200;
  std::uint64_t seed = 1;
  double tol = 1e-10;
};

struct Clustering {
  std::vector<UnitPoint> centers;
  std::vector<int> labels;  // per occurrence
  std::vector<int> sizes;
  /// Σ over occurrences of D(w, assigned center).
  double objective = 0.0;
  /// Set when k exceeds the number of distinct support points; some centers
  /// then coincide.
  bool degenerate_order = false;
  /// Objective after each accepted Lloyd step of the winning restart.
  std::vector<double> trace;
  int restart = 0;

  std::size_t k() const noexcept { return centers.size(); }
};

Matrix centers_matrix(std::span<const UnitPoint> centers);

/// Nearest-center labels (lowest index on ties). Any center left without an
/// occurrence takes the occurrence farthest from its own center among clusters
/// of size >= 2, repeated until no cluster is empty.
Assignment assign(const WeightedMultiset& w, std::span<const UnitPoint> centers,
                  const Dissimilarity& spec);

/// Σ_w m(w) D(w, nearest center).
double objective(const WeightedMultiset& w, std::span<const UnitPoint> centers,
                 const Dissimilarity& spec);

/// Optimal single center: the normalized weighted mean for cosine, the unit
/// leading eigenvector of Σ m(w) wwᵀ for principal-component, the supplied
/// center function (else the best cluster member) for custom dissimilarities.
UnitPoint center_update(const WeightedMultiset& cluster, const Dissimilarity& spec);

/// Lloyd iteration with `restarts` seeded starts, each restart seeded by
/// derive_seed(config.seed, restart). Restarts run concurrently; the lowest
/// objective wins, ties to the lowest restart index.
Clustering k_cluster(const WeightedMultiset& w, int k, const Dissimilarity& spec,
                     const ClusterConfig& config, Warnings* warnings = nullptr);

/// Exhaustive oracle over all k-subsets of the support followed by one
/// update + reassign pass. Limited to support <= 12 and k <= 4.
Clustering brute_force_k_cluster(const WeightedMultiset& w, int k, const Dissimilarity& spec);

}  // namespace xclust
