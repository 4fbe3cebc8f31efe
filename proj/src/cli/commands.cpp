#include "xclust/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xclust/extremes.hpp"
#include "xclust/factor_models.hpp"
#include "xclust/io.hpp"
#include "xclust/order_selection.hpp"
#include "xclust/pipeline.hpp"
#include "xclust/theory_bounds.hpp"

namespace xclust::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// ---- parsing helpers

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(begin, end, v);
  if (text.empty() || ec != std::errc() || p != end) fail(ErrorKind::InvalidInput, "bad " + what + " '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size())
    fail(ErrorKind::InvalidInput, "bad " + what + " '" + text + "'");
  return v;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(text);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

/// "a..b", "a" or "a,b,c".
std::vector<int> parse_m_range(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int a = parse_int(text.substr(0, dots), "m-range");
    const int b = parse_int(text.substr(dots + 2), "m-range");
    if (a < 1 || b < a) fail(ErrorKind::InvalidInput, "m-range must be a..b with 1 <= a <= b");
    for (int m = a; m <= b; ++m) out.push_back(m);
    return out;
  }
  for (const auto& part : split_commas(text)) {
    const int m = parse_int(part, "m-range");
    if (m < 1) fail(ErrorKind::InvalidInput, "candidate orders must be positive");
    out.push_back(m);
  }
  if (out.empty()) fail(ErrorKind::InvalidInput, "empty m-range");
  return out;
}

std::vector<double> parse_t_grid(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split_commas(text)) {
    const double t = parse_number(part, "t value");
    if (!(t >= 0.0)) fail(ErrorKind::InvalidInput, "t values must be nonnegative");
    out.push_back(t);
  }
  if (out.empty()) fail(ErrorKind::InvalidInput, "empty t-grid");
  return out;
}

std::string default_t_grid_text() {
  std::string s;
  for (double t : default_t_grid()) s += (s.empty() ? "" : ",") + format_double(t);
  return s;
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

/// Problems with an input table are data errors.
DataMatrix load_data(const std::string& path) {
  try {
    DataMatrix d = read_csv(path);
    d.validate();
    return d;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) fail(ErrorKind::Io, path + ": " + e.what());
    throw;
  }
}

// ---- report helpers

Json spectral_json(const SpectralEstimate& est) {
  Json atoms = Json::array();
  for (const auto& a : est.atoms) atoms.push_back(std::vector<double>(a.coords().begin(), a.coords().end()));
  return Json{{"atoms", atoms}, {"probs", est.probs}};
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

Json theory_json(const TheoryConstants& t) {
  Json j{{"source", t.source}, {"k", t.k}, {"r_A", t.r_a}, {"p_min", t.p_min}};
  j["t0"] = t.t0 ? Json(*t.t0) : Json(nullptr);
  j["delta_t"] = t.delta_t;
  return j;
}

Json bound_json(const BoundReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  Json j{{"kind", r.kind}, {"parameters", params}, {"analytic_bound", r.analytic_bound}};
  j["empirical_value"] = r.empirical ? Json(*r.empirical) : Json(nullptr);
  j["replicates"] = r.replicates;
  j["hits"] = r.hits;
  j["empirical_lower_99"] = r.empirical_lower;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["status"] = r.status;
  return j;
}

struct Context {
  std::vector<std::string> arguments;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

Json document(const Context& ctx, const std::string& command, Json config, const Warnings& warnings,
              Json result) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = "xclust";
  doc["version"] = kVersion;
  doc["command"] = command;
  doc["provenance"] = Json{{"arguments", ctx.arguments}, {"config", std::move(config)}};
  doc["warnings"] = warnings;
  doc["result"] = std::move(result);
  return doc;
}

void emit_warnings(const Context& ctx, const Warnings& warnings) {
  for (const auto& w : warnings) *ctx.err << "warning: " << w << '\n';
}

// ---- options shared by the data commands

struct DataOptions {
  std::string input;
  std::string output;
  std::uint64_t seed = 0;
  double alpha = 2.0;
  std::string norm_r;
  std::string norm_s = "p:2";
  std::string dissim = "cos";
  std::string subsample = "frac:0.1";
  int restarts = 10;
  int max_iter = 200;
  bool standardize = false;

  void add(CLI::App* sub, bool stochastic) {
    sub->add_option("--input", input, "input CSV with a header row")->required();
    sub->add_option("--output", output, "output directory");
    if (stochastic) sub->add_option("--seed", seed, "random seed")->required();
    sub->add_option("--alpha", alpha, "tail index")->capture_default_str();
    sub->add_option("--norm-r", norm_r, "radial norm p:<x>|sup (default p:2, fit: p:<alpha>)");
    sub->add_option("--norm-s", norm_s, "sphere norm p:<x>|sup")->capture_default_str();
    sub->add_option("--dissim", dissim, "cos|pc")->capture_default_str();
    sub->add_option("--subsample", subsample, "frac:<q>|ell:<n>")->capture_default_str();
    sub->add_option("--restarts", restarts, "clustering restarts")->capture_default_str();
    sub->add_option("--max-iter", max_iter, "Lloyd iterations per restart")->capture_default_str();
    sub->add_flag("--standardize", standardize, "rank-transform the margins first");
  }

  PipelineConfig pipeline(const std::string& default_norm_r) const {
    PipelineConfig p;
    if (!(alpha > 0.0)) fail(ErrorKind::InvalidInput, "alpha must be positive");
    if (restarts < 1) fail(ErrorKind::InvalidInput, "restarts must be positive");
    if (max_iter < 1) fail(ErrorKind::InvalidInput, "max-iter must be positive");
    p.standardize = standardize;
    p.subsample.alpha = alpha;
    p.subsample.norm_r = NormSpec::parse(norm_r.empty() ? default_norm_r : norm_r);
    p.subsample.norm_s = NormSpec::parse(norm_s);
    p.subsample.set_selection(subsample);
    p.dissim = Dissimilarity::parse(dissim);
    if (!(p.dissim.sphere_norm() == p.subsample.norm_s))
      fail(ErrorKind::InvalidInput, "--dissim " + dissim + " lives on the " + p.dissim.sphere_norm().to_string() +
                                        " sphere; set --norm-s accordingly");
    p.cluster.restarts = restarts;
    p.cluster.max_iter = max_iter;
    p.cluster.seed = seed;
    return p;
  }

  Json config(const PipelineConfig& p) const {
    return Json{{"input", input},
                {"seed", seed},
                {"alpha", alpha},
                {"norm_r", p.subsample.norm_r.to_string()},
                {"norm_s", p.subsample.norm_s.to_string()},
                {"dissim", dissim},
                {"subsample", p.subsample.selection_string()},
                {"restarts", restarts},
                {"max_iter", max_iter},
                {"standardize", standardize}};
  }
};

Json subsample_json(const ExtremalSubsample& s) {
  return Json{{"size", s.multiset.size()}, {"distinct", s.multiset.support_size()}, {"threshold", s.threshold}};
}

// ---- simulate

struct SimulateOptions {
  std::string scheme;
  std::string model;
  std::string model_config;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_simulate(const SimulateOptions& o, const Context& ctx) {
  if (o.scheme.empty() == o.model.empty()) fail(ErrorKind::InvalidInput, "give exactly one of --scheme and --model");
  if (o.n < 1) fail(ErrorKind::InvalidInput, "--n must be positive");
  FactorCoefficients model;
  int resamples = 0;
  if (!o.scheme.empty()) {
    const RandomModel rm = random_model(parse_scheme(o.scheme), derive_seed(o.seed, 0));
    model = rm.model;
    resamples = rm.resamples;
  } else {
    model = read_model(o.model, o.model_config);
  }
  const DataMatrix data = simulate(model, o.n, derive_seed(o.seed, 1));
  const fs::path dir = output_dir(o.output);
  write_csv(dir / "data.csv", data);
  write_coefficients(dir / "model.csv", model.b);
  write_model_config(dir / "model.json", model);
  Json config{{"scheme", o.scheme}, {"model", o.model}, {"model_config", o.model_config}, {"n", o.n}, {"seed", o.seed}};
  Json result{{"rows", data.rows()},
              {"cols", data.cols()},
              {"alpha", model.alpha},
              {"type", to_string(model.type)},
              {"resamples", resamples},
              {"coefficients", matrix_json(model.b)},
              {"files", {"data.csv", "model.csv", "model.json"}}};
  write_text(dir / "simulate.json", document(ctx, "simulate", config, {}, result).dump(2) + "\n");
  *ctx.out << "wrote " << (dir / "data.csv").string() << " (" << data.rows() << " x " << data.cols() << ")\n";
  return kExitOk;
}

// ---- standardize

struct StandardizeOptions {
  std::string input;
  std::string output;
  double alpha = 2.0;
};

int cmd_standardize(const StandardizeOptions& o, const Context& ctx) {
  if (!(o.alpha > 0.0)) fail(ErrorKind::InvalidInput, "alpha must be positive");
  const DataMatrix data = load_data(o.input);
  Warnings warnings;
  DataMatrix z;
  try {
    z = standardize_margins(data, o.alpha, &warnings);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) fail(ErrorKind::Io, e.what());
    throw;
  }
  const fs::path path = o.output.empty() ? output_dir("") / "standardized.csv" : fs::path(o.output);
  write_csv(path, z);
  emit_warnings(ctx, warnings);
  *ctx.out << "wrote " << path.string() << '\n';
  return kExitOk;
}

// ---- select-order

struct SelectOptions {
  DataOptions data;
  std::string m_range = "1..10";
  std::string t_grid = default_t_grid_text();
  std::string truth_model;
  std::string truth_config;
};

int cmd_select_order(const SelectOptions& o, const Context& ctx) {
  const PipelineConfig p = o.data.pipeline("p:2");
  const std::vector<int> m_range = parse_m_range(o.m_range);
  const std::vector<double> t_grid = parse_t_grid(o.t_grid);
  const DataMatrix data = load_data(o.data.input);
  SelectionRun run = run_select_order(data, p, m_range, t_grid);
  const OrderSelectionReport& r = run.report;

  TheoryConstants theory;
  if (!o.truth_model.empty()) {
    const FactorCoefficients truth = read_model(o.truth_model, o.truth_config);
    theory = theory_constants(spectral_from_coefficients(truth, p.subsample.norm_r, p.subsample.norm_s), p.dissim,
                              t_grid, "truth");
  } else {
    std::size_t col = 0;
    while (col + 1 < t_grid.size() && !(t_grid[col] > 0.0)) ++col;
    const int m = r.selected_order_per_t[col];
    const auto it = std::find(r.m_range.begin(), r.m_range.end(), m);
    const Clustering& c = r.clusterings[static_cast<std::size_t>(it - r.m_range.begin())];
    theory = theory_constants(spectral_from_clustering(c), p.dissim, t_grid, "fitted");
  }

  Json result{{"subsample", subsample_json(run.subsample)},
              {"m_range", r.m_range},
              {"t_grid", r.t_grid},
              {"scores", r.scores},
              {"asw", r.asw},
              {"penalty", r.penalties},
              {"min_cluster_fraction", r.min_cluster_fraction},
              {"min_center_dissimilarity", r.min_center_dissimilarity},
              {"objective", r.objective},
              {"degenerate", r.degenerate},
              {"selected_order_per_t", r.selected_order_per_t},
              {"theory", theory_json(theory)}};
  Json config = o.data.config(p);
  config["m_range"] = o.m_range;
  config["t_grid"] = t_grid;
  config["truth_model"] = o.truth_model;

  const fs::path dir = output_dir(o.data.output);
  write_text(dir / "select_order.json", document(ctx, "select-order", config, run.warnings, result).dump(2) + "\n");
  std::ostringstream csv;
  csv << "m,t,asw,penalty,s_t,min_cluster_frac,min_center_dissim\n";
  for (std::size_t i = 0; i < r.m_range.size(); ++i)
    for (std::size_t j = 0; j < r.t_grid.size(); ++j)
      csv << r.m_range[i] << ',' << format_double(r.t_grid[j]) << ',' << format_double(r.asw[i]) << ','
          << format_double(r.penalties[i][j]) << ',' << format_double(r.scores[i][j]) << ','
          << format_double(r.min_cluster_fraction[i]) << ',' << format_double(r.min_center_dissimilarity[i]) << '\n';
  write_text(dir / "select_order.csv", csv.str());
  emit_warnings(ctx, run.warnings);
  for (std::size_t j = 0; j < r.t_grid.size(); ++j)
    *ctx.out << "t=" << format_double(r.t_grid[j]) << " selected m=" << r.selected_order_per_t[j] << '\n';
  return kExitOk;
}

// ---- fit

struct FitOptions {
  DataOptions data;
  int k = 0;
  std::string order_from;
  double t = -1.0;
};

int order_from_report(const std::string& path, double t) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  Json doc;
  try {
    in >> doc;
    const auto& res = doc.at("result");
    const auto grid = res.at("t_grid").get<std::vector<double>>();
    const auto sel = res.at("selected_order_per_t").get<std::vector<int>>();
    if (grid.empty() || grid.size() != sel.size()) fail(ErrorKind::Io, path + ": malformed selection report");
    std::size_t col = 0;
    if (t >= 0.0) {
      const auto it = std::find(grid.begin(), grid.end(), t);
      if (it == grid.end()) fail(ErrorKind::InvalidInput, "t = " + format_double(t) + " is not in the report's grid");
      col = static_cast<std::size_t>(it - grid.begin());
    } else {
      while (col + 1 < grid.size() && !(grid[col] > 0.0)) ++col;
    }
    return sel[col];
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, path + ": " + e.what());
  }
}

int cmd_fit(const FitOptions& o, const Context& ctx) {
  const PipelineConfig p = o.data.pipeline("p:" + format_double(o.data.alpha));
  if ((o.k > 0) == !o.order_from.empty()) fail(ErrorKind::InvalidInput, "give exactly one of --k and --order-from");
  const int k = o.k > 0 ? o.k : order_from_report(o.order_from, o.t);
  const DataMatrix data = load_data(o.data.input);
  FitRun run = run_fit(data, p, k);

  Json dominance = Json::array();
  for (std::size_t i = 0; i < run.dominance.size(); ++i)
    dominance.push_back(Json{{"coordinate", data.column_names.empty() ? std::to_string(i + 1) : data.column_names[i]},
                             {"factor", run.dominance[i] + 1}});
  Json result{{"k", k},
              {"subsample", subsample_json(run.subsample)},
              {"objective", run.clustering.objective},
              {"degenerate_order", run.clustering.degenerate_order},
              {"spectral", spectral_json(run.estimate)},
              {"raw_coefficients", matrix_json(run.raw)},
              {"coefficients", matrix_json(run.coefficients.b)},
              {"dominance", dominance}};
  Json config = o.data.config(p);
  config["k"] = k;
  config["order_from"] = o.order_from;

  const fs::path dir = output_dir(o.data.output);
  write_coefficients(dir / "coefficients.csv", run.coefficients.b);
  write_text(dir / "fit.json", document(ctx, "fit", config, run.warnings, result).dump(2) + "\n");
  emit_warnings(ctx, run.warnings);
  *ctx.out << "fitted k=" << k << ", wrote " << (dir / "coefficients.csv").string() << '\n';
  return kExitOk;
}

// ---- bounds

struct BoundsOptions {
  std::string output;
  // tail
  std::size_t n = 1000;
  double q1 = 0.5, q2 = 0.1, r = 0.1;
  std::string side = "upper";
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  // rates
  double x = 0.1, y = 0.01, p_min = 0.5, r_a = 0.5, eps0 = 0.1;
  int k = 2;
  std::string t_values = default_t_grid_text();
  // eps0
  std::string model, model_config, scheme, norm_r = "p:2", norm_s = "p:2", dissim = "cos";
  std::size_t resolution = 2048;
};

void write_or_print(const Context& ctx, const std::string& output, const Json& doc) {
  if (output.empty()) *ctx.out << doc.dump(2) << '\n';
  else write_text(output, doc.dump(2) + "\n");
}

int cmd_bounds_tail(const BoundsOptions& o, const Context& ctx, CLI::App* sub) {
  const TailSide side = o.side == "upper" ? TailSide::Upper
                        : o.side == "lower" ? TailSide::Lower
                                            : (fail(ErrorKind::InvalidInput, "side must be upper or lower"), TailSide::Upper);
  if (o.replicates > 0 && sub->count("--seed") == 0) fail(ErrorKind::InvalidInput, "--seed is required with --replicates");
  Json result{{"kl_bound", binomial_bernoulli_tail_bound(o.n, o.q1, o.q2, o.r, side, BoundForm::Kl)},
              {"simplified_bound", binomial_bernoulli_tail_bound(o.n, o.q1, o.q2, o.r, side, BoundForm::Simplified)},
              {"kl", kl_bernoulli(side == TailSide::Upper ? o.q1 + o.r : o.q1 - o.r, o.q1)}};
  if (o.replicates > 0) result["monte_carlo"] = bound_json(validate_tail_bound(o.n, o.q1, o.q2, o.r, side, o.replicates, o.seed));
  Json config{{"n", o.n}, {"q1", o.q1}, {"q2", o.q2}, {"r", o.r}, {"side", o.side}, {"replicates", o.replicates}, {"seed", o.seed}};
  write_or_print(ctx, o.output, document(ctx, "bounds tail", config, {}, result));
  return kExitOk;
}

int cmd_bounds_large_dev(const BoundsOptions& o, const Context& ctx) {
  const LargeDeviation ld = large_deviation_rate(o.x, o.y, o.k, o.p_min, o.r_a, o.eps0);
  Json result{{"delta", ld.delta}, {"rate", ld.rate}, {"c_k", ld.c_k}, {"first_branch", ld.first_branch}};
  Json config{{"x", o.x}, {"y", o.y}, {"k", o.k}, {"p_min", o.p_min}, {"r_A", o.r_a}, {"eps0", o.eps0}};
  write_or_print(ctx, o.output, document(ctx, "bounds large-dev", config, {}, result));
  return kExitOk;
}

int cmd_bounds_order(const BoundsOptions& o, const Context& ctx) {
  const double t0 = t_upper_bound(o.r_a, o.p_min, o.k);
  Json rows = Json::array();
  for (double t : parse_t_grid(o.t_values)) {
    Json row{{"t", t}, {"delta_t", delta_t(o.r_a, o.p_min, o.k, t)}};
    if (t > 0.0 && t < t0) {
      const FalseSelectionDelta fs = false_selection_rate_delta(o.k, o.p_min, o.r_a, t);
      row["false_selection_delta"] = fs.delta;
      row["rate"] = fs.rate;
      row["residual"] = fs.residual;
    } else {
      row["false_selection_delta"] = nullptr;
    }
    rows.push_back(row);
  }
  Json result{{"t0", t0}, {"rows", rows}};
  Json config{{"k", o.k}, {"p_min", o.p_min}, {"r_A", o.r_a}, {"t", o.t_values}};
  write_or_print(ctx, o.output, document(ctx, "bounds order", config, {}, result));
  return kExitOk;
}

int cmd_bounds_eps0(const BoundsOptions& o, const Context& ctx) {
  if (o.scheme.empty() == o.model.empty()) fail(ErrorKind::InvalidInput, "give exactly one of --scheme and --model");
  const FactorCoefficients model =
      o.scheme.empty() ? read_model(o.model, o.model_config) : random_model(parse_scheme(o.scheme), derive_seed(o.seed, 0)).model;
  const Dissimilarity spec = Dissimilarity::parse(o.dissim);
  const NormSpec norm_s = NormSpec::parse(o.norm_s);
  if (!(spec.sphere_norm() == norm_s)) fail(ErrorKind::InvalidInput, "--norm-s must match the dissimilarity's sphere");
  const SpectralEstimate truth = spectral_from_coefficients(model, NormSpec::parse(o.norm_r), norm_s);
  Warnings warnings;
  const Epsilon0 e = epsilon0(truth.atoms, spec, o.resolution, &warnings);
  const double p_min = *std::min_element(truth.probs.begin(), truth.probs.end());
  Json result{{"eps0", e.value}, {"bracket", {e.lower, e.upper}}, {"found", e.found},
              {"r_A", e.r_a},   {"p_min", p_min},                  {"spectral", spectral_json(truth)}};
  Json config{{"scheme", o.scheme}, {"model", o.model}, {"seed", o.seed}, {"norm_r", o.norm_r},
              {"norm_s", o.norm_s}, {"dissim", o.dissim}, {"resolution", o.resolution}};
  emit_warnings(ctx, warnings);
  write_or_print(ctx, o.output, document(ctx, "bounds eps0", config, warnings, result));
  return kExitOk;
}

// ---- reproduce

struct ReproduceOptions {
  std::string scheme;
  int replicates = 100;
  std::size_t n = 10000;
  std::size_t top = 1000;
  std::string m_range = "1..10";
  std::string t_grid = default_t_grid_text();
  int restarts = 10;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_reproduce(const ReproduceOptions& o, const Context& ctx) {
  ReproduceConfig c;
  c.scheme = parse_scheme(o.scheme);
  c.replicates = o.replicates;
  c.n = o.n;
  c.top = o.top;
  c.m_range = parse_m_range(o.m_range);
  c.t_grid = parse_t_grid(o.t_grid);
  if (o.restarts < 1) fail(ErrorKind::InvalidInput, "restarts must be positive");
  c.cluster.restarts = o.restarts;
  c.cluster.seed = derive_seed(o.seed, 1);
  c.seed = derive_seed(o.seed, 0);
  Warnings warnings;
  const ReproduceResult res = reproduce(c, &warnings);

  const std::string stem = std::string("reproduce_") + to_string(c.scheme);
  const fs::path dir = output_dir(o.output);
  std::ostringstream matrix;
  matrix << "algorithm,t";
  for (int r = 0; r < c.replicates; ++r) matrix << ",r" << r + 1;
  matrix << '\n';
  std::ostringstream summary;
  summary << "algorithm,t,success_rate\n";
  Json rates = Json::object();
  for (std::size_t a = 0; a < res.algorithms.size(); ++a) {
    Json per_t = Json::array();
    for (std::size_t j = 0; j < c.t_grid.size(); ++j) {
      matrix << res.algorithms[a] << ',' << format_double(c.t_grid[j]);
      for (int m : res.selected[a * c.t_grid.size() + j]) matrix << ',' << m;
      matrix << '\n';
      summary << res.algorithms[a] << ',' << format_double(c.t_grid[j]) << ','
              << format_double(res.success_rate[a][j]) << '\n';
      per_t.push_back(res.success_rate[a][j]);
    }
    rates[res.algorithms[a]] = per_t;
  }
  write_text(dir / (stem + "_matrix.csv"), matrix.str());
  write_text(dir / (stem + "_summary.csv"), summary.str());
  Json config{{"scheme", o.scheme}, {"replicates", o.replicates}, {"n", o.n}, {"top", o.top},
              {"m_range", c.m_range}, {"t_grid", c.t_grid}, {"restarts", o.restarts}, {"seed", o.seed}};
  Json result{{"true_order", true_order(c.scheme)},
              {"algorithms", res.algorithms},
              {"t_grid", c.t_grid},
              {"selected", res.selected},
              {"success_rate", rates},
              {"resamples", res.resamples}};
  write_text(dir / (stem + ".json"), document(ctx, "reproduce", config, warnings, result).dump(2) + "\n");
  *ctx.out << summary.str();
  return kExitOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Guard:
    case ErrorKind::Domain: return kExitConfig;
    case ErrorKind::Io: return kExitData;
    case ErrorKind::DegenerateInput:
    case ErrorKind::DegenerateResult: return kExitDegenerate;
    case ErrorKind::Internal: break;
  }
  return kExitInternal;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clustering-based estimation of multivariate extremes", "xclust"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* s_sim = app.add_subcommand("simulate", "simulate a max-linear or sum-linear factor model");
  s_sim->add_option("--scheme", sim.scheme, "random model scheme d4k2|d4k6|d6k6|d10k6");
  s_sim->add_option("--model", sim.model, "coefficient CSV (header b1..bk)");
  s_sim->add_option("--model-config", sim.model_config, "model JSON (alpha, type, noise)");
  s_sim->add_option("--n", sim.n, "number of rows")->capture_default_str();
  s_sim->add_option("--seed", sim.seed, "random seed")->required();
  s_sim->add_option("--output", sim.output, "output directory");

  StandardizeOptions std_o;
  auto* s_std = app.add_subcommand("standardize", "rank-transform every column to alpha-Frechet margins");
  s_std->add_option("--input", std_o.input, "input CSV")->required();
  s_std->add_option("--output", std_o.output, "output CSV (default <output dir>/standardized.csv)");
  s_std->add_option("--alpha", std_o.alpha, "tail index")->capture_default_str();

  SelectOptions sel;
  auto* s_sel = app.add_subcommand("select-order", "penalized silhouette curves over candidate orders");
  sel.data.add(s_sel, true);
  s_sel->add_option("--m-range", sel.m_range, "candidate orders a..b or a,b,c")->capture_default_str();
  s_sel->add_option("--t-grid", sel.t_grid, "comma-separated penalty exponents")->capture_default_str();
  s_sel->add_option("--truth-model", sel.truth_model, "coefficient CSV of the generating model");
  s_sel->add_option("--truth-config", sel.truth_config, "model JSON for --truth-model");

  FitOptions fit;
  auto* s_fit = app.add_subcommand("fit", "estimate the spectral measure and the coefficient matrix");
  fit.data.add(s_fit, true);
  s_fit->add_option("--k", fit.k, "order");
  s_fit->add_option("--order-from", fit.order_from, "select-order JSON report to take the order from");
  s_fit->add_option("--t", fit.t, "which t of the report (default: first positive)");

  BoundsOptions bo;
  auto* s_bounds = app.add_subcommand("bounds", "evaluate tail bounds and rates");
  s_bounds->require_subcommand(1);
  s_bounds->add_option("--output", bo.output, "output JSON file (default stdout)");
  auto* b_tail = s_bounds->add_subcommand("tail", "binomial-Bernoulli tail bound");
  b_tail->add_option("--n", bo.n)->capture_default_str();
  b_tail->add_option("--q1", bo.q1)->capture_default_str();
  b_tail->add_option("--q2", bo.q2)->capture_default_str();
  b_tail->add_option("--r", bo.r)->capture_default_str();
  b_tail->add_option("--side", bo.side, "upper|lower")->capture_default_str();
  b_tail->add_option("--replicates", bo.replicates, "Monte Carlo replicates (0: none)")->capture_default_str();
  b_tail->add_option("--seed", bo.seed, "random seed");
  auto* b_ld = s_bounds->add_subcommand("large-dev", "large-deviation exponent");
  b_ld->add_option("--x", bo.x)->capture_default_str();
  b_ld->add_option("--y", bo.y)->capture_default_str();
  b_ld->add_option("--k", bo.k)->capture_default_str();
  b_ld->add_option("--p-min", bo.p_min)->capture_default_str();
  b_ld->add_option("--r-a", bo.r_a)->capture_default_str();
  b_ld->add_option("--eps0", bo.eps0)->capture_default_str();
  auto* b_order = s_bounds->add_subcommand("order", "penalty range and false-selection rate");
  b_order->add_option("--k", bo.k)->capture_default_str();
  b_order->add_option("--p-min", bo.p_min)->capture_default_str();
  b_order->add_option("--r-a", bo.r_a)->capture_default_str();
  b_order->add_option("--t", bo.t_values, "comma-separated t values")->capture_default_str();
  auto* b_eps = s_bounds->add_subcommand("eps0", "separation constant of a model's spectral atoms");
  b_eps->add_option("--model", bo.model, "coefficient CSV");
  b_eps->add_option("--model-config", bo.model_config, "model JSON");
  b_eps->add_option("--scheme", bo.scheme, "random model scheme");
  b_eps->add_option("--seed", bo.seed, "seed for --scheme");
  b_eps->add_option("--norm-r", bo.norm_r)->capture_default_str();
  b_eps->add_option("--norm-s", bo.norm_s)->capture_default_str();
  b_eps->add_option("--dissim", bo.dissim)->capture_default_str();
  b_eps->add_option("--resolution", bo.resolution)->capture_default_str();

  ReproduceOptions rep;
  auto* s_rep = app.add_subcommand("reproduce", "order identification study over random models");
  s_rep->add_option("--scheme", rep.scheme, "d4k2|d4k6|d6k6|d10k6")->required();
  s_rep->add_option("--replicates", rep.replicates)->capture_default_str();
  s_rep->add_option("--n", rep.n)->capture_default_str();
  s_rep->add_option("--top", rep.top, "subsample size (largest 2-norms)")->capture_default_str();
  s_rep->add_option("--m-range", rep.m_range)->capture_default_str();
  s_rep->add_option("--t-grid", rep.t_grid)->capture_default_str();
  s_rep->add_option("--restarts", rep.restarts)->capture_default_str();
  s_rep->add_option("--seed", rep.seed, "random seed")->required();
  s_rep->add_option("--output", rep.output, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Context ctx;
  for (int i = 1; i < argc; ++i) ctx.arguments.emplace_back(argv[i]);
  ctx.out = &out;
  ctx.err = &err;
  try {
    if (s_sim->parsed()) return cmd_simulate(sim, ctx);
    if (s_std->parsed()) return cmd_standardize(std_o, ctx);
    if (s_sel->parsed()) return cmd_select_order(sel, ctx);
    if (s_fit->parsed()) return cmd_fit(fit, ctx);
    if (b_tail->parsed()) return cmd_bounds_tail(bo, ctx, b_tail);
    if (b_ld->parsed()) return cmd_bounds_large_dev(bo, ctx);
    if (b_order->parsed()) return cmd_bounds_order(bo, ctx);
    if (b_eps->parsed()) return cmd_bounds_eps0(bo, ctx);
    if (s_rep->parsed()) return cmd_reproduce(rep, ctx);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitConfig;
}

}  // namespace xclust::cli
