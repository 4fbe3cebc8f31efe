#include "xclust/extremes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace xclust {

void DataMatrix::validate() const {
  if (rows() < 1) fail(ErrorKind::InvalidInput, "data needs at least one row");
  if (cols() < 2) fail(ErrorKind::InvalidInput, "data needs at least two columns");
  if (!column_names.empty() && column_names.size() != cols())
    fail(ErrorKind::InvalidInput, "column name count does not match the column count");
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0)
        fail(ErrorKind::InvalidInput, "entry at row " + std::to_string(i + 1) + ", column " +
                                          std::to_string(j + 1) + " is not a finite nonnegative number");
    }
}

DataMatrix standardize_margins(const DataMatrix& data, double alpha, Warnings* warnings) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidInput, "alpha must be positive");
  data.validate();
  const std::size_t n = data.rows();
  if (n < 2) fail(ErrorKind::InvalidInput, "standardization needs at least two rows");
  DataMatrix out{Matrix(n, data.cols()), data.column_names};
  const double nd = static_cast<double>(n);
  for (std::size_t j = 0; j < data.cols(); ++j) {
    std::vector<double> col = data.values.column(j);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) {
      const std::string name = data.column_names.empty() ? std::to_string(j + 1) : data.column_names[j];
      warn(warnings, "column " + name + " is constant; standardized to zeros");
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto below = std::lower_bound(sorted.begin(), sorted.end(), col[i]) - sorted.begin();
      if (below == 0) continue;
      const double f = static_cast<double>(below) / nd;
      out.values(i, j) = std::pow(-std::log(f), -1.0 / alpha);
    }
  }
  return out;
}

void SubsampleConfig::set_selection(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorKind::InvalidInput, "subsample must be frac:<q> or ell:<n>");
  const std::string head = text.substr(0, colon);
  const std::string tail = text.substr(colon + 1);
  if (head == "frac") {
    double q = 0.0;
    const auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), q);
    if (ec != std::errc() || p != tail.data() + tail.size())
      fail(ErrorKind::InvalidInput, "bad fraction '" + tail + "'");
    selection = Selection::TopFraction;
    fraction = q;
  } else if (head == "ell") {
    std::size_t l = 0;
    const auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), l);
    if (ec != std::errc() || p != tail.data() + tail.size())
      fail(ErrorKind::InvalidInput, "bad ell '" + tail + "'");
    selection = Selection::Threshold;
    ell = l;
  } else {
    fail(ErrorKind::InvalidInput, "subsample must be frac:<q> or ell:<n>");
  }
}

std::string SubsampleConfig::selection_string() const {
  if (selection == Selection::Threshold) return "ell:" + std::to_string(ell);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, fraction);
  return "frac:" + std::string(buf, res.ptr);
}

void SubsampleConfig::validate(std::size_t n) const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidInput, "alpha must be positive");
  if (!norm_s.convex()) fail(ErrorKind::InvalidInput, "norm_s must be a norm (p >= 1 or sup)");
  if (norm_r.kind == NormSpec::Kind::P && !(norm_r.p > 0.0))
    fail(ErrorKind::InvalidInput, "norm_r exponent must be positive");
  if (selection == Selection::TopFraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorKind::InvalidInput, "fraction must lie in (0, 1)");
  } else {
    if (ell < 1 || ell >= n) fail(ErrorKind::InvalidInput, "ell must satisfy 1 <= ell < n");
  }
}

ExtremalSubsample extremal_subsample(const DataMatrix& data, const SubsampleConfig& config,
                                     Warnings* warnings) {
  data.validate();
  const std::size_t n = data.rows();
  config.validate(n);
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = norm(data.values.row(i), config.norm_r);

  ExtremalSubsample out;
  if (config.selection == SubsampleConfig::Selection::Threshold) {
    out.threshold = std::pow(static_cast<double>(n) / static_cast<double>(config.ell), 1.0 / config.alpha);
    for (std::size_t i = 0; i < n; ++i)
      if (norms[i] >= out.threshold) out.rows.push_back(i);
  } else {
    const auto count = static_cast<std::size_t>(std::ceil(config.fraction * static_cast<double>(n) - 1e-9));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
    out.rows.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(std::min(count, n)));
    std::sort(out.rows.begin(), out.rows.end());
    out.threshold = out.rows.empty() ? 0.0 : norms[idx[out.rows.size() - 1]];
  }

  std::size_t zeros = 0;
  Matrix projected(0, data.cols());
  std::vector<std::size_t> kept;
  for (std::size_t i : out.rows) {
    if (!(norms[i] > 0.0)) {
      ++zeros;
      continue;
    }
    projected.append_row(project_to_sphere(data.values.row(i), config.norm_s).coords());
    kept.push_back(i);
  }
  if (zeros > 0) warn(warnings, std::to_string(zeros) + " zero rows excluded from the extremal subsample");
  out.rows = std::move(kept);
  if (out.rows.empty()) fail(ErrorKind::DegenerateResult, "the extremal subsample is empty");
  out.multiset = WeightedMultiset::from_rows(projected, config.norm_s);
  return out;
}

double empirical_spectral_measure(const WeightedMultiset& w, const Region& region) {
  if (w.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < w.support_size(); ++i)
    if (region(w.point(i))) hits += static_cast<std::size_t>(w.multiplicity(i));
  return static_cast<double>(hits) / static_cast<double>(w.size());
}

Region dissimilarity_ball(const Dissimilarity& spec, const UnitPoint& center, double radius) {
  return [spec, center, radius](std::span<const double> w) { return spec(w, center.coords()) < radius; };
}

void SpectralEstimate::validate() const {
  if (atoms.empty()) fail(ErrorKind::InvalidInput, "spectral estimate has no atoms");
  if (atoms.size() != probs.size()) fail(ErrorKind::InvalidInput, "atoms and probs differ in length");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) fail(ErrorKind::InvalidInput, "negative spectral mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::InvalidInput, "spectral masses do not sum to 1");
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (atoms[i] == atoms[j]) fail(ErrorKind::InvalidInput, "spectral atoms must be distinct");
}

SpectralEstimate spectral_from_clustering(const Clustering& clustering) {
  SpectralEstimate est;
  est.atoms = clustering.centers;
  const double total = std::accumulate(clustering.sizes.begin(), clustering.sizes.end(), 0.0);
  for (int s : clustering.sizes) est.probs.push_back(s / total);
  return est;
}

SpectralEstimate estimate_spectral(const WeightedMultiset& w, int k, const Dissimilarity& spec,
                                   const ClusterConfig& config, Warnings* warnings) {
  return spectral_from_clustering(k_cluster(w, k, spec, config, warnings));
}

AtomMatch match_atoms(const SpectralEstimate& est, const SpectralEstimate& truth,
                      const Dissimilarity& spec) {
  const std::size_t k = truth.k();
  if (est.k() != k) fail(ErrorKind::InvalidInput, "estimate and truth differ in order");
  if (k == 0) fail(ErrorKind::InvalidInput, "empty spectral measures");
  std::vector<std::vector<double>> cost(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) cost[i][j] = spec(est.atoms[j].coords(), truth.atoms[i].coords());

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  auto total = [&](const std::vector<int>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += cost[i][static_cast<std::size_t>(p[i])];
    return s;
  };
  std::vector<int> best = perm;
  double best_cost = total(perm);
  if (k <= 8) {
    while (std::next_permutation(perm.begin(), perm.end())) {
      const double c = total(perm);
      if (c < best_cost) {
        best_cost = c;
        best = perm;
      }
    }
  } else {
    std::vector<bool> used(k, false);
    for (std::size_t i = 0; i < k; ++i) {
      int pick = -1;
      for (std::size_t j = 0; j < k; ++j)
        if (!used[j] && (pick < 0 || cost[i][j] < cost[i][static_cast<std::size_t>(pick)])) pick = static_cast<int>(j);
      used[static_cast<std::size_t>(pick)] = true;
      best[i] = pick;
    }
    best_cost = total(best);
    for (bool improved = true; improved;) {
      improved = false;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
          std::swap(best[a], best[b]);
          const double c = total(best);
          if (c < best_cost - 1e-15) {
            best_cost = c;
            improved = true;
          } else {
            std::swap(best[a], best[b]);
          }
        }
    }
  }

  AtomMatch m;
  m.permutation = best;
  m.total_atom_error = best_cost;
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(best[i]);
    m.max_atom_error = std::max(m.max_atom_error, cost[i][j]);
    m.max_prob_error = std::max(m.max_prob_error, std::abs(est.probs[j] - truth.probs[i]));
  }
  return m;
}

}  // namespace xclust
