#pragma once

// Max-linear and sum-linear factor models with α-Fréchet factors, their
// discrete spectral measures and recovery of the coefficient matrix from a
// spectral estimate.

#include <cstdint>
#include <string>
#include <vector>

#include "xclust/core.hpp"
#include "xclust/extremes.hpp"
#include "xclust/geometry.hpp"

namespace xclust {

enum class ModelType { MaxLinear, SumLinear };

const char* to_string(ModelType type);
ModelType parse_model_type(const std::string& text);  // "max-linear" | "sum-linear"

/// Optional lighter-tailed noise: ε_i = scale · Fréchet(alpha) per coordinate,
/// added (sum-linear) or maxed in (max-linear).
struct NoiseSpec {
  bool enabled = false;
  double alpha = 2.0;
  double scale = 1.0;
};

struct FactorCoefficients {
  Matrix b;  // d × k
  double alpha = 1.0;
  ModelType type = ModelType::MaxLinear;
  NoiseSpec noise;

  std::size_t d() const noexcept { return b.rows(); }
  std::size_t k() const noexcept { return b.cols(); }

  /// Nonnegative finite entries, nonzero rows and columns, distinct columns,
  /// Σ_j b_ij^α = 1 within 1e-10 for every row, noise lighter than the factors.
  void validate() const;
};

/// n rows of X = B Z or X = B ⊙ Z with i.i.d. standard α-Fréchet Z.
DataMatrix simulate(const FactorCoefficients& model, std::size_t n, std::uint64_t seed);

/// p_j ∝ ‖b_j‖_r^α, a_j = b_j / ‖b_j‖_s. Any nonnegative B with nonzero columns.
SpectralEstimate spectral_from_coefficients(const Matrix& b, double alpha, const NormSpec& norm_r,
                                            const NormSpec& norm_s);
inline SpectralEstimate spectral_from_coefficients(const FactorCoefficients& model,
                                                   const NormSpec& norm_r, const NormSpec& norm_s) {
  return spectral_from_coefficients(model.b, model.alpha, norm_r, norm_s);
}

/// b̂_j = (p_j d)^{1/α} a_j / ‖a_j‖_α.
Matrix coefficients_from_spectral(const SpectralEstimate& est, double alpha, std::size_t d);

/// Divides every row by its α-norm. A zero row is a degenerate result naming
/// the coordinate.
FactorCoefficients row_normalize(const Matrix& b_hat, double alpha,
                                 ModelType type = ModelType::MaxLinear);

/// Per row, the column index of the largest entry (lowest index on ties).
std::vector<int> dominant_factor(const Matrix& b);

/// Column permutation of `estimate` closest to `truth` in max-entry error,
/// exhaustive for k <= 8.
struct ColumnMatch {
  std::vector<int> permutation;  // truth column j ↔ estimate column permutation[j]
  double max_entry_error = 0.0;
};
ColumnMatch match_columns(const Matrix& estimate, const Matrix& truth);

enum class Scheme { D4K2, D4K6, D6K6, D10K6 };

const char* to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);  // "d4k2" | "d4k6" | "d6k6" | "d10k6"
int true_order(Scheme scheme);
std::size_t dimension(Scheme scheme);

struct RandomModel {
  FactorCoefficients model;
  int resamples = 0;  // rejected draws before acceptance
};

/// Uniform loadings on the scheme's sparsity pattern for b_1..b_{k−1}, α = 1,
/// max-linear, last column solved from the row constraint. Draws with a
/// negative last column are rejected (at most 10⁴ attempts).
RandomModel random_model(Scheme scheme, std::uint64_t seed);

}  // namespace xclust
