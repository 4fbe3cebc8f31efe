#pragma once

// End-to-end runs shared by the command-line tool and the acceptance suite:
// order selection on data, model fitting, and the simulation study over
// random factor models.

#include <optional>
#include <string>
#include <vector>

#include "xclust/clustering.hpp"
#include "xclust/extremes.hpp"
#include "xclust/factor_models.hpp"
#include "xclust/order_selection.hpp"

namespace xclust {

struct PipelineConfig {
  bool standardize = false;
  SubsampleConfig subsample;  // subsample.alpha is the tail index
  Dissimilarity dissim = Dissimilarity::cosine();
  ClusterConfig cluster;
};

/// Population or fitted constants that drive t₀ and Δ_t.
struct TheoryConstants {
  std::string source;  // "truth" or "fitted"
  int k = 0;
  double r_a = 0.0;
  double p_min = 0.0;
  std::optional<double> t0;           // absent when r_A k p_min >= 1
  std::vector<double> delta_t;        // per t of the grid
};

inline constexpr std::size_t kTheoryResolution = 2048;

TheoryConstants theory_constants(const SpectralEstimate& spectral, const Dissimilarity& spec,
                                 const std::vector<double>& t_grid, std::string source,
                                 std::size_t resolution = kTheoryResolution);

struct SelectionRun {
  ExtremalSubsample subsample;
  OrderSelectionReport report;
  Warnings warnings;
};

SelectionRun run_select_order(const DataMatrix& data, const PipelineConfig& config,
                              const std::vector<int>& m_range, const std::vector<double>& t_grid);

struct FitRun {
  ExtremalSubsample subsample;
  Clustering clustering;
  SpectralEstimate estimate;
  Matrix raw;                        // B̂ before row normalization
  FactorCoefficients coefficients;   // row-normalized
  std::vector<int> dominance;        // per coordinate, the dominant factor
  Warnings warnings;
};

/// Recovery is exact in the limit when the subsample norm is the α-norm.
FitRun run_fit(const DataMatrix& data, const PipelineConfig& config, int k);

struct ReproduceConfig {
  Scheme scheme = Scheme::D4K2;
  int replicates = 100;
  std::size_t n = 10000;
  std::size_t top = 1000;
  std::vector<double> t_grid = default_t_grid();
  std::vector<int> m_range = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  ClusterConfig cluster;
  std::uint64_t seed = 1;
};

struct ReproduceResult {
  ReproduceConfig config;
  std::vector<std::string> algorithms;  // "cos", "pc"
  /// row algorithm * |t_grid| + t_index, column replicate; the selected order
  std::vector<std::vector<int>> selected;
  /// [algorithm][t_index]
  std::vector<std::vector<double>> success_rate;
  std::vector<int> resamples;  // per replicate, rejected model draws
};

/// Per replicate r: random_model(derive_seed(seed, 2r)), simulate n rows with
/// derive_seed(seed, 2r + 1), keep the `top` largest 2-norms on the 2-norm
/// sphere, then select the order with both dissimilarities.
ReproduceResult reproduce(const ReproduceConfig& config, Warnings* warnings = nullptr);

}  // namespace xclust
