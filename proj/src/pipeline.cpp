#include "xclust/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace xclust {

TheoryConstants theory_constants(const SpectralEstimate& spectral, const Dissimilarity& spec,
                                 const std::vector<double>& t_grid, std::string source,
                                 std::size_t resolution) {
  TheoryConstants out;
  out.source = std::move(source);
  out.k = static_cast<int>(spectral.k());
  out.p_min = *std::min_element(spectral.probs.begin(), spectral.probs.end());
  bool distinct = true;
  for (std::size_t i = 0; i < spectral.k(); ++i)
    for (std::size_t j = i + 1; j < spectral.k(); ++j) distinct = distinct && !(spectral.atoms[i] == spectral.atoms[j]);
  if (!distinct || !(out.p_min > 0.0)) return out;
  out.r_a = separation_radius(spectral.atoms, spec, resolution);
  if (out.r_a > 0.0 && out.r_a * out.k * out.p_min < 1.0) {
    out.t0 = t_upper_bound(out.r_a, out.p_min, out.k);
    for (double t : t_grid) out.delta_t.push_back(delta_t(out.r_a, out.p_min, out.k, t));
  }
  return out;
}

namespace {

ExtremalSubsample subsample_of(const DataMatrix& data, const PipelineConfig& config, Warnings& warnings) {
  if (config.standardize) {
    const DataMatrix z = standardize_margins(data, config.subsample.alpha, &warnings);
    return extremal_subsample(z, config.subsample, &warnings);
  }
  return extremal_subsample(data, config.subsample, &warnings);
}

}  // namespace

SelectionRun run_select_order(const DataMatrix& data, const PipelineConfig& config,
                              const std::vector<int>& m_range, const std::vector<double>& t_grid) {
  SelectionRun run;
  run.subsample = subsample_of(data, config, run.warnings);
  run.report = select_order(run.subsample.multiset, config.dissim, m_range, t_grid, config.cluster, &run.warnings);
  return run;
}

FitRun run_fit(const DataMatrix& data, const PipelineConfig& config, int k) {
  FitRun run;
  run.subsample = subsample_of(data, config, run.warnings);
  if (k < 1 || static_cast<std::size_t>(k) > run.subsample.multiset.size())
    fail(ErrorKind::InvalidInput, "order " + std::to_string(k) + " does not fit a subsample of size " +
                                      std::to_string(run.subsample.multiset.size()));
  run.clustering = k_cluster(run.subsample.multiset, k, config.dissim, config.cluster, &run.warnings);
  run.estimate = spectral_from_clustering(run.clustering);
  run.raw = coefficients_from_spectral(run.estimate, config.subsample.alpha, data.cols());
  run.coefficients = row_normalize(run.raw, config.subsample.alpha);
  run.dominance = dominant_factor(run.coefficients.b);
  return run;
}

ReproduceResult reproduce(const ReproduceConfig& config, Warnings* warnings) {
  if (config.replicates < 1) fail(ErrorKind::InvalidInput, "replicates must be positive");
  if (config.top < 1 || config.top >= config.n) fail(ErrorKind::InvalidInput, "top must satisfy 1 <= top < n");
  ReproduceResult out;
  out.config = config;
  out.algorithms = {"cos", "pc"};
  const std::vector<Dissimilarity> specs = {Dissimilarity::cosine(), Dissimilarity::principal_component()};
  const std::size_t nt = config.t_grid.size();
  const auto reps = static_cast<std::size_t>(config.replicates);
  out.selected.assign(specs.size() * nt, std::vector<int>(reps, 0));
  out.resamples.assign(reps, 0);
  std::vector<Warnings> local(reps);

  SubsampleConfig sub;
  sub.alpha = 1.0;
  sub.selection = SubsampleConfig::Selection::TopFraction;
  sub.fraction = static_cast<double>(config.top) / static_cast<double>(config.n);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ri = 0; ri < static_cast<std::ptrdiff_t>(reps); ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    const RandomModel model = random_model(config.scheme, derive_seed(config.seed, 2 * r));
    out.resamples[r] = model.resamples;
    const DataMatrix data = simulate(model.model, config.n, derive_seed(config.seed, 2 * r + 1));
    const ExtremalSubsample s = extremal_subsample(data, sub, &local[r]);
    for (std::size_t a = 0; a < specs.size(); ++a) {
      ClusterConfig cc = config.cluster;
      cc.seed = derive_seed(config.cluster.seed, r);
      const OrderSelectionReport rep = select_order(s.multiset, specs[a], config.m_range, config.t_grid, cc, &local[r]);
      for (std::size_t j = 0; j < nt; ++j) out.selected[a * nt + j][r] = rep.selected_order_per_t[j];
    }
  }
  for (std::size_t r = 0; r < reps; ++r)
    for (auto& msg : local[r]) warn(warnings, "replicate " + std::to_string(r) + ": " + msg);

  const int k = true_order(config.scheme);
  out.success_rate.assign(specs.size(), std::vector<double>(nt, 0.0));
  for (std::size_t a = 0; a < specs.size(); ++a)
    for (std::size_t j = 0; j < nt; ++j) {
      const auto& row = out.selected[a * nt + j];
      out.success_rate[a][j] =
          static_cast<double>(std::count(row.begin(), row.end(), k)) / static_cast<double>(reps);
    }
  return out;
}

}  // namespace xclust
