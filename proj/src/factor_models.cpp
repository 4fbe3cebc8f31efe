#include "xclust/factor_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xclust/kernels.hpp"

namespace xclust {

const char* to_string(ModelType type) {
  return type == ModelType::MaxLinear ? "max-linear" : "sum-linear";
}

ModelType parse_model_type(const std::string& text) {
  if (text == "max-linear" || text == "max") return ModelType::MaxLinear;
  if (text == "sum-linear" || text == "sum") return ModelType::SumLinear;
  fail(ErrorKind::InvalidInput, "unknown model type '" + text + "'");
}

void FactorCoefficients::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidInput, "alpha must be positive");
  if (d() == 0 || k() == 0) fail(ErrorKind::InvalidInput, "coefficient matrix is empty");
  for (std::size_t i = 0; i < d(); ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < k(); ++j) {
      const double v = b(i, j);
      if (!std::isfinite(v) || v < 0.0)
        fail(ErrorKind::InvalidInput, "coefficient (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                                          ") must be finite and nonnegative");
      row_sum += std::pow(v, alpha);
    }
    if (row_sum == 0.0) fail(ErrorKind::InvalidInput, "row " + std::to_string(i + 1) + " is zero");
    if (std::abs(row_sum - 1.0) > 1e-10)
      fail(ErrorKind::InvalidInput, "row " + std::to_string(i + 1) + " violates the row constraint (sum of b^alpha = " +
                                        std::to_string(row_sum) + ")");
  }
  for (std::size_t j = 0; j < k(); ++j) {
    bool nonzero = false;
    for (std::size_t i = 0; i < d(); ++i) nonzero = nonzero || b(i, j) > 0.0;
    if (!nonzero) fail(ErrorKind::InvalidInput, "column " + std::to_string(j + 1) + " is zero");
    for (std::size_t l = j + 1; l < k(); ++l) {
      bool same = true;
      for (std::size_t i = 0; i < d() && same; ++i) same = b(i, j) == b(i, l);
      if (same)
        fail(ErrorKind::InvalidInput, "columns " + std::to_string(j + 1) + " and " + std::to_string(l + 1) + " coincide");
    }
  }
  if (noise.enabled) {
    if (!(noise.alpha > alpha)) fail(ErrorKind::InvalidInput, "noise tail index must exceed alpha");
    if (!(noise.scale > 0.0)) fail(ErrorKind::InvalidInput, "noise scale must be positive");
  }
}

DataMatrix simulate(const FactorCoefficients& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  if (n == 0) fail(ErrorKind::InvalidInput, "n must be positive");
  kernels::FactorSampler sampler;
  sampler.coefficients = &model.b;
  sampler.alpha = model.alpha;
  sampler.mixing = model.type == ModelType::MaxLinear ? kernels::Mixing::Max : kernels::Mixing::Sum;
  if (model.noise.enabled) {
    sampler.noise_alpha = model.noise.alpha;
    sampler.noise_scale = model.noise.scale;
  }
  DataMatrix out{kernels::simulate_factor_rows(sampler, n, seed), {}};
  for (std::size_t i = 0; i < model.d(); ++i) out.column_names.push_back("x" + std::to_string(i + 1));
  return out;
}

SpectralEstimate spectral_from_coefficients(const Matrix& b, double alpha, const NormSpec& norm_r,
                                            const NormSpec& norm_s) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidInput, "alpha must be positive");
  if (b.rows() == 0 || b.cols() == 0) fail(ErrorKind::InvalidInput, "coefficient matrix is empty");
  SpectralEstimate est;
  std::vector<double> mass;
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const std::vector<double> col = b.column(j);
    for (double v : col)
      if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::InvalidInput, "coefficients must be finite and nonnegative");
    const double r = norm(col, norm_r);
    if (!(r > 0.0)) fail(ErrorKind::InvalidInput, "column " + std::to_string(j + 1) + " is zero");
    mass.push_back(std::pow(r, alpha));
    est.atoms.push_back(project_to_sphere(col, norm_s));
  }
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  for (double m : mass) est.probs.push_back(m / total);
  return est;
}

Matrix coefficients_from_spectral(const SpectralEstimate& est, double alpha, std::size_t d) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidInput, "alpha must be positive");
  if (est.atoms.size() != est.probs.size() || est.atoms.empty())
    fail(ErrorKind::InvalidInput, "malformed spectral estimate");
  Matrix out(d, est.k());
  const NormSpec alpha_norm = NormSpec::p_norm(alpha);
  for (std::size_t j = 0; j < est.k(); ++j) {
    const auto a = est.atoms[j].coords();
    if (a.size() != d) fail(ErrorKind::InvalidInput, "atom dimension differs from d");
    const double an = norm(a, alpha_norm);
    if (!(an > 0.0)) fail(ErrorKind::InvalidInput, "zero atom");
    const double scale = std::pow(est.probs[j] * static_cast<double>(d), 1.0 / alpha) / an;
    for (std::size_t i = 0; i < d; ++i) out(i, j) = scale * a[i];
  }
  return out;
}

FactorCoefficients row_normalize(const Matrix& b_hat, double alpha, ModelType type) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidInput, "alpha must be positive");
  FactorCoefficients out;
  out.alpha = alpha;
  out.type = type;
  out.b = b_hat;
  const NormSpec alpha_norm = NormSpec::p_norm(alpha);
  for (std::size_t i = 0; i < b_hat.rows(); ++i) {
    const double r = norm(b_hat.row(i), alpha_norm);
    if (!(r > 0.0))
      fail(ErrorKind::DegenerateResult, "coordinate " + std::to_string(i + 1) + " has no estimated loading");
    // rows normalized up to rounding are left untouched, so normalizing twice
    // changes nothing
    if (std::abs(r - 1.0) <= 1e-14) continue;
    for (double& v : out.b.row(i)) v /= r;
  }
  return out;
}

std::vector<int> dominant_factor(const Matrix& b) {
  std::vector<int> out;
  for (std::size_t i = 0; i < b.rows(); ++i) {
    const auto row = b.row(i);
    out.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
  return out;
}

ColumnMatch match_columns(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    fail(ErrorKind::InvalidInput, "coefficient matrices differ in shape");
  const std::size_t k = truth.cols();
  if (k > 8) fail(ErrorKind::Guard, "column matching is limited to k <= 8");
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  ColumnMatch best{perm, std::numeric_limits<double>::infinity()};
  do {
    double err = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < truth.rows(); ++i)
        err = std::max(err, std::abs(estimate(i, static_cast<std::size_t>(perm[j])) - truth(i, j)));
    if (err < best.max_entry_error) best = {perm, err};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::D4K2: return "d4k2";
    case Scheme::D4K6: return "d4k6";
    case Scheme::D6K6: return "d6k6";
    case Scheme::D10K6: return "d10k6";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  for (Scheme s : {Scheme::D4K2, Scheme::D4K6, Scheme::D6K6, Scheme::D10K6})
    if (text == to_string(s)) return s;
  fail(ErrorKind::InvalidInput, "unknown scheme '" + text + "' (d4k2, d4k6, d6k6, d10k6)");
}

int true_order(Scheme scheme) { return scheme == Scheme::D4K2 ? 2 : 6; }

std::size_t dimension(Scheme scheme) {
  switch (scheme) {
    case Scheme::D4K2:
    case Scheme::D4K6: return 4;
    case Scheme::D6K6: return 6;
    case Scheme::D10K6: return 10;
  }
  return 0;
}

namespace {

struct Pattern {
  std::vector<std::vector<std::size_t>> support;  // nonzero rows of b_1..b_{k-1}
  double divisor = 1.0;
};

Pattern pattern(Scheme scheme) {
  switch (scheme) {
    case Scheme::D4K2: return {{{0, 1, 2, 3}}, 2.0};
    case Scheme::D4K6: return {{{0, 1, 2, 3}, {0, 2}, {1, 3}, {0, 1}, {2, 3}}, 3.0};
    case Scheme::D6K6: return {{{0, 1, 2, 3, 4, 5}, {0, 2, 4}, {1, 3, 5}, {0, 1, 2}, {3, 4, 5}}, 3.0};
    case Scheme::D10K6:
      return {{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {0, 1}, {2, 3}, {4, 5}, {6, 7, 8, 9}}, 2.0};
  }
  return {};
}

}  // namespace

RandomModel random_model(Scheme scheme, std::uint64_t seed) {
  const Pattern pat = pattern(scheme);
  const std::size_t d = dimension(scheme);
  const std::size_t k = static_cast<std::size_t>(true_order(scheme));
  Rng rng(seed);
  RandomModel out;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Matrix b(d, k);
    for (std::size_t j = 0; j + 1 < k; ++j)
      for (std::size_t i : pat.support[j]) b(i, j) = uniform_open(rng) / pat.divisor;
    bool ok = true;
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j + 1 < k; ++j) s += b(i, j);
      b(i, k - 1) = 1.0 - s;
      ok = ok && b(i, k - 1) >= 0.0;
    }
    if (ok) {
      out.model.b = std::move(b);
      out.model.alpha = 1.0;
      out.model.type = ModelType::MaxLinear;
      try {
        out.model.validate();
        return out;
      } catch (const Error&) {
      }
    }
    ++out.resamples;
  }
  fail(ErrorKind::Internal, "random model rejection sampling did not terminate");
}

}  // namespace xclust
