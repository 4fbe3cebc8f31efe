#pragma once

// Marginal standardization, extraction of the extremal subsample, the
// empirical spectral measure and clustering-based spectral estimation.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "xclust/clustering.hpp"
#include "xclust/core.hpp"
#include "xclust/geometry.hpp"

namespace xclust {

/// n observations of d nonnegative finite values, optionally with column names.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> column_names;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }

  /// n >= 1, d >= 2, entries finite and >= 0, names empty or one per column.
  void validate() const;
};

/// Columnwise rank transform to standard α-Fréchet margins:
/// F(x) = #{x_i < x} / n and x ↦ (−ln F(x))^{−1/α}, minima mapped to 0.
/// A constant column becomes all zeros and adds a warning.
DataMatrix standardize_margins(const DataMatrix& data, double alpha, Warnings* warnings = nullptr);

struct SubsampleConfig {
  enum class Selection { Threshold, TopFraction };

  double alpha = 1.0;
  NormSpec norm_r = NormSpec::p_norm(2.0);
  NormSpec norm_s = NormSpec::p_norm(2.0);
  Selection selection = Selection::TopFraction;
  std::size_t ell = 0;  // threshold mode: keep ‖x‖_r >= (n/ell)^{1/α}
  double fraction = 0.1;  // top-fraction mode: keep the ⌈qn⌉ largest norms

  /// "frac:<q>" or "ell:<n>".
  void set_selection(const std::string& text);
  std::string selection_string() const;
  void validate(std::size_t n) const;
};

/// Rows kept by the selection rule (ascending row order) and their projections.
struct ExtremalSubsample {
  std::vector<std::size_t> rows;
  WeightedMultiset multiset;
  double threshold = 0.0;  // smallest kept norm in top-fraction mode
};

/// Keeps the extreme rows under `config` and projects them onto the norm_s
/// sphere. Top-fraction ties go to the lower row index; zero rows are dropped
/// with a warning.
ExtremalSubsample extremal_subsample(const DataMatrix& data, const SubsampleConfig& config,
                                     Warnings* warnings = nullptr);

inline WeightedMultiset extract_extremal_subsample(const DataMatrix& data,
                                                   const SubsampleConfig& config,
                                                   Warnings* warnings = nullptr) {
  return extremal_subsample(data, config, warnings).multiset;
}

using Region = std::function<bool(std::span<const double>)>;

/// |W ∩ region| / |W|, 0 for an empty multiset.
double empirical_spectral_measure(const WeightedMultiset& w, const Region& region);

/// Indicator of the open ball B_D(center, radius).
Region dissimilarity_ball(const Dissimilarity& spec, const UnitPoint& center, double radius);

/// Discrete spectral measure Σ p_i δ_{a_i}.
struct SpectralEstimate {
  std::vector<UnitPoint> atoms;
  std::vector<double> probs;

  std::size_t k() const noexcept { return atoms.size(); }
  /// Matching lengths, probs >= 0 summing to 1 within 1e-12, distinct atoms.
  void validate() const;
};

/// Atoms are the centers, masses the cluster sizes over |W|.
SpectralEstimate spectral_from_clustering(const Clustering& clustering);

SpectralEstimate estimate_spectral(const WeightedMultiset& w, int k, const Dissimilarity& spec,
                                   const ClusterConfig& config, Warnings* warnings = nullptr);

struct AtomMatch {
  /// permutation[i] is the estimated atom matched to true atom i.
  std::vector<int> permutation;
  double max_atom_error = 0.0;
  double max_prob_error = 0.0;
  double total_atom_error = 0.0;
};

/// Bijection minimizing Σ_i D(â_π(i), a_i); exhaustive for k <= 8, greedy
/// followed by pairwise-swap refinement above.
AtomMatch match_atoms(const SpectralEstimate& est, const SpectralEstimate& truth,
                      const Dissimilarity& spec);

}  // namespace xclust
