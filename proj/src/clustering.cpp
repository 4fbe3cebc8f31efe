#include "xclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "xclust/kernels.hpp"

namespace xclust {

namespace {

constexpr double kDuplicateTolerance = 1e-12;

bool rows_close(std::span<const double> a, std::span<const double> b) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (std::abs(a[j] - b[j]) > kDuplicateTolerance) return false;
  return true;
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void check_centers(const WeightedMultiset& w, std::span<const UnitPoint> centers,
                   const Dissimilarity& spec) {
  if (w.size() == 0) fail(ErrorKind::InvalidInput, "empty multiset");
  if (centers.empty()) fail(ErrorKind::InvalidInput, "at least one center is required");
  if (!(w.sphere_norm() == spec.sphere_norm()))
    fail(ErrorKind::InvalidInput, "multiset sphere does not match the dissimilarity's sphere");
  for (const auto& c : centers) {
    if (c.dim() != w.dim()) fail(ErrorKind::InvalidInput, "center dimension mismatch");
    if (!(c.sphere_norm() == spec.sphere_norm()))
      fail(ErrorKind::InvalidInput, "center sphere does not match the dissimilarity's sphere");
  }
}

UnitPoint to_sphere(std::vector<double> v, const NormSpec& sphere) {
  // Leading eigenvectors of nonnegative matrices are nonnegative up to
  // rounding; anything negative is clamped before renormalizing.
  for (double& x : v) x = std::max(0.0, x);
  const double n = norm(v, sphere);
  if (!(n > 0.0)) fail(ErrorKind::Internal, "center update produced the zero vector");
  for (double& x : v) x /= n;
  return UnitPoint(std::move(v), sphere);
}

// Optimal center of the occurrences of `w` labelled `cluster`, with weights
// taken from the labels. `fallback` is returned for an empty cluster.
UnitPoint cluster_center(const WeightedMultiset& w, std::span<const int> labels, int cluster,
                         const Dissimilarity& spec, const UnitPoint* fallback) {
  const std::size_t d = w.dim();
  std::vector<std::size_t> members;
  std::vector<double> weights;
  for (std::size_t i = 0; i < w.support_size(); ++i) {
    int count = 0;
    for (std::size_t o = w.offset(i); o < w.offset(i + 1); ++o) count += labels[o] == cluster;
    if (count > 0) {
      members.push_back(i);
      weights.push_back(count);
    }
  }
  if (members.empty()) {
    if (fallback == nullptr) fail(ErrorKind::Internal, "center update of an empty cluster");
    return *fallback;
  }

  switch (spec.kind()) {
    case DissimilarityKind::Cosine: {
      std::vector<double> mean(d, 0.0);
      for (std::size_t m = 0; m < members.size(); ++m) {
        const auto p = w.point(members[m]);
        for (std::size_t j = 0; j < d; ++j) mean[j] += weights[m] * p[j];
      }
      return to_sphere(std::move(mean), spec.sphere_norm());
    }
    case DissimilarityKind::PrincipalComponent: {
      Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                                      static_cast<Eigen::Index>(d));
      for (std::size_t m = 0; m < members.size(); ++m) {
        const auto p = w.point(members[m]);
        const Eigen::Map<const Eigen::VectorXd> v(p.data(), static_cast<Eigen::Index>(d));
        moment.noalias() += weights[m] * v * v.transpose();
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(moment);
      if (solver.info() != Eigen::Success) fail(ErrorKind::Internal, "eigen decomposition failed");
      Eigen::VectorXd lead = solver.eigenvectors().col(static_cast<Eigen::Index>(d) - 1);
      if (lead.sum() < 0.0) lead = -lead;
      return to_sphere(std::vector<double>(lead.data(), lead.data() + d), spec.sphere_norm());
    }
    case DissimilarityKind::Custom: break;
  }

  Matrix pts(0, d);
  for (std::size_t m : members) pts.append_row(w.point(m));
  if (spec.center_function()) return to_sphere(spec.center_function()(pts, weights), spec.sphere_norm());
  // best member
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < pts.rows(); ++a) {
    double cost = 0.0;
    for (std::size_t b = 0; b < pts.rows(); ++b) cost += weights[b] * spec(pts.row(a), pts.row(b));
    if (cost < best_cost) {
      best_cost = cost;
      best = a;
    }
  }
  return w.unit_point(members[best]);
}

std::vector<UnitPoint> update_centers(const WeightedMultiset& w, std::span<const int> labels,
                                      std::span<const UnitPoint> current,
                                      const Dissimilarity& spec) {
  std::vector<UnitPoint> out;
  out.reserve(current.size());
  for (std::size_t c = 0; c < current.size(); ++c)
    out.push_back(cluster_center(w, labels, static_cast<int>(c), spec, &current[c]));
  return out;
}

double assigned_objective(const WeightedMultiset& w, std::span<const UnitPoint> centers,
                          const Assignment& a, const Dissimilarity& spec) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.support_size(); ++i)
    for (std::size_t o = w.offset(i); o < w.offset(i + 1); ++o)
      total += spec(w.point(i), centers[static_cast<std::size_t>(a.labels[o])].coords());
  return total;
}

// Distance-weighted seeding over the support: first pick ∝ multiplicity, then
// ∝ multiplicity × D(w, nearest chosen center).
std::vector<UnitPoint> seed_centers(const WeightedMultiset& w, int k, const Dissimilarity& spec,
                                    Rng& rng) {
  const std::size_t n = w.support_size();
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) weight[i] = w.multiplicity(i);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<UnitPoint> centers;
  auto draw = [&](const std::vector<double>& wt) {
    const double total = std::accumulate(wt.begin(), wt.end(), 0.0);
    double target = uniform_open(rng) * total;
    for (std::size_t i = 0; i < n; ++i) {
      if (wt[i] <= 0.0) continue;
      target -= wt[i];
      if (target < 0.0) return i;
    }
    for (std::size_t i = n; i-- > 0;)
      if (wt[i] > 0.0) return i;
    return std::size_t{0};
  };
  std::size_t pick = draw(weight);
  for (int c = 0; c < k; ++c) {
    centers.push_back(w.unit_point(pick));
    if (c + 1 == k) break;
    std::vector<double> score(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], spec(w.point(i), w.point(pick)));
      score[i] = weight[i] * nearest[i];
      total += score[i];
    }
    // support exhausted: fall back to multiplicity weights, duplicates allowed
    pick = total > 0.0 ? draw(score) : draw(weight);
  }
  return centers;
}

Clustering lloyd(const WeightedMultiset& w, int k, const Dissimilarity& spec,
                 const ClusterConfig& config, int restart) {
  Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(restart)));
  std::vector<UnitPoint> centers = seed_centers(w, k, spec, rng);
  double obj = objective(w, centers, spec);
  Clustering out;
  out.trace.push_back(obj);
  for (int it = 0; it < config.max_iter; ++it) {
    const Assignment a = assign(w, centers, spec);
    std::vector<UnitPoint> next = update_centers(w, a.labels, centers, spec);
    const double next_obj = objective(w, next, spec);
    if (!(next_obj <= obj)) break;
    const double gain = obj - next_obj;
    centers = std::move(next);
    obj = next_obj;
    out.trace.push_back(obj);
    if (gain < config.tol) break;
  }
  const Assignment a = assign(w, centers, spec);
  out.objective = assigned_objective(w, centers, a, spec);
  out.centers = std::move(centers);
  out.labels = a.labels;
  out.sizes = a.sizes;
  out.restart = restart;
  return out;
}

WeightedMultiset lexicographic(const WeightedMultiset& w, std::vector<std::size_t>& order) {
  order.resize(w.support_size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(w.point(a), w.point(b)); });
  std::vector<UnitPoint> pts;
  std::vector<int> mult;
  for (std::size_t i : order) {
    pts.push_back(w.unit_point(i));
    mult.push_back(w.multiplicity(i));
  }
  return WeightedMultiset::from_points(pts, mult);
}

}  // namespace

WeightedMultiset WeightedMultiset::from_rows(const Matrix& points, const NormSpec& sphere) {
  WeightedMultiset out;
  out.sphere_ = sphere;
  const std::size_t n = points.rows();
  if (n == 0) {
    out.points_ = Matrix(0, points.cols());
    out.finish();
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) UnitPoint(std::vector<double>(points.row(i).begin(), points.row(i).end()), sphere);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(points.row(a), points.row(b));
  });
  // Runs of sorted rows close to the run's head form one support point,
  // represented by the run's lowest row index.
  std::vector<std::size_t> rep(n);
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s + 1;
    while (e < n && rows_close(points.row(idx[s]), points.row(idx[e]))) ++e;
    std::size_t low = idx[s];
    for (std::size_t t = s; t < e; ++t) low = std::min(low, idx[t]);
    for (std::size_t t = s; t < e; ++t) rep[idx[t]] = low;
    s = e;
  }

  std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
  out.points_ = Matrix(0, points.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = rep[i];
    if (slot[r] == std::numeric_limits<std::size_t>::max()) {
      slot[r] = out.mult_.size();
      out.points_.append_row(points.row(r));
      out.mult_.push_back(0);
    }
    ++out.mult_[slot[r]];
  }
  out.finish();
  return out;
}

WeightedMultiset WeightedMultiset::from_points(std::span<const UnitPoint> points,
                                               std::span<const int> multiplicities) {
  if (points.size() != multiplicities.size())
    fail(ErrorKind::InvalidInput, "points and multiplicities differ in length");
  if (points.empty()) fail(ErrorKind::InvalidInput, "multiset needs at least one point");
  WeightedMultiset out;
  out.sphere_ = points.front().sphere_norm();
  out.points_ = Matrix(0, points.front().dim());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].dim() != out.dim() || !(points[i].sphere_norm() == out.sphere_))
      fail(ErrorKind::InvalidInput, "multiset points must share dimension and sphere");
    if (multiplicities[i] <= 0) fail(ErrorKind::InvalidInput, "multiplicities must be positive");
    for (std::size_t j = 0; j < out.points_.rows(); ++j)
      if (rows_close(out.points_.row(j), points[i].coords()))
        fail(ErrorKind::InvalidInput, "multiset support contains duplicate points");
    out.points_.append_row(points[i].coords());
    out.mult_.push_back(multiplicities[i]);
  }
  out.finish();
  return out;
}

void WeightedMultiset::finish() {
  offsets_.assign(mult_.size() + 1, 0);
  for (std::size_t i = 0; i < mult_.size(); ++i)
    offsets_[i + 1] = offsets_[i] + static_cast<std::size_t>(mult_[i]);
}

UnitPoint WeightedMultiset::unit_point(std::size_t i) const {
  const auto p = points_.row(i);
  return UnitPoint(std::vector<double>(p.begin(), p.end()), sphere_);
}

std::size_t WeightedMultiset::support_index(std::size_t occurrence) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), occurrence);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

Matrix centers_matrix(std::span<const UnitPoint> centers) {
  Matrix m(0, centers.empty() ? 0 : centers.front().dim());
  for (const auto& c : centers) m.append_row(c.coords());
  return m;
}

Assignment assign(const WeightedMultiset& w, std::span<const UnitPoint> centers,
                  const Dissimilarity& spec) {
  check_centers(w, centers, spec);
  const std::size_t k = centers.size();
  if (k > w.size()) fail(ErrorKind::InvalidInput, "more centers than occurrences");
  kernels::NearestTwo nt;
  kernels::nearest_two(w.support(), centers_matrix(centers), spec, nt);

  Assignment a;
  a.labels.resize(w.size());
  a.sizes.assign(k, 0);
  std::vector<double> dist(w.size());
  for (std::size_t i = 0; i < w.support_size(); ++i) {
    for (std::size_t o = w.offset(i); o < w.offset(i + 1); ++o) {
      a.labels[o] = nt.nearest[i];
      dist[o] = nt.first[i];
    }
    a.sizes[static_cast<std::size_t>(nt.nearest[i])] += w.multiplicity(i);
  }

  for (;;) {
    const auto empty = std::find(a.sizes.begin(), a.sizes.end(), 0);
    if (empty == a.sizes.end()) break;
    const int target = static_cast<int>(empty - a.sizes.begin());
    std::size_t pick = w.size();
    double far = -1.0;
    for (std::size_t o = 0; o < w.size(); ++o) {
      if (a.sizes[static_cast<std::size_t>(a.labels[o])] < 2) continue;
      if (dist[o] > far) {
        far = dist[o];
        pick = o;
      }
    }
    if (pick == w.size()) fail(ErrorKind::Internal, "empty-cluster repair found no donor");
    --a.sizes[static_cast<std::size_t>(a.labels[pick])];
    a.labels[pick] = target;
    ++a.sizes[static_cast<std::size_t>(target)];
    dist[pick] = spec(w.point(w.support_index(pick)), centers[static_cast<std::size_t>(target)].coords());
  }
  return a;
}

double objective(const WeightedMultiset& w, std::span<const UnitPoint> centers,
                 const Dissimilarity& spec) {
  check_centers(w, centers, spec);
  kernels::NearestTwo nt;
  kernels::nearest_two(w.support(), centers_matrix(centers), spec, nt);
  double total = 0.0;
  for (std::size_t i = 0; i < w.support_size(); ++i) total += w.multiplicity(i) * nt.first[i];
  return total;
}

UnitPoint center_update(const WeightedMultiset& cluster, const Dissimilarity& spec) {
  if (cluster.size() == 0) fail(ErrorKind::InvalidInput, "center update of an empty cluster");
  if (!(cluster.sphere_norm() == spec.sphere_norm()))
    fail(ErrorKind::InvalidInput, "multiset sphere does not match the dissimilarity's sphere");
  const std::vector<int> labels(cluster.size(), 0);
  return cluster_center(cluster, labels, 0, spec, nullptr);
}

Clustering k_cluster(const WeightedMultiset& w, int k, const Dissimilarity& spec,
                     const ClusterConfig& config, Warnings* warnings) {
  if (k < 1) fail(ErrorKind::InvalidInput, "k must be at least 1");
  if (w.size() == 0) fail(ErrorKind::InvalidInput, "empty multiset");
  if (static_cast<std::size_t>(k) > w.size())
    fail(ErrorKind::InvalidInput, "k = " + std::to_string(k) + " exceeds |W| = " + std::to_string(w.size()));
  if (!(w.sphere_norm() == spec.sphere_norm()))
    fail(ErrorKind::InvalidInput, "multiset sphere does not match the dissimilarity's sphere");
  if (config.restarts < 1) fail(ErrorKind::InvalidInput, "at least one restart is required");

  // Work on a canonical support order so the result does not depend on how
  // the input occurrences were listed.
  std::vector<std::size_t> order;
  const WeightedMultiset canon = lexicographic(w, order);

  std::vector<Clustering> runs(static_cast<std::size_t>(config.restarts));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < config.restarts; ++r) runs[static_cast<std::size_t>(r)] = lloyd(canon, k, spec, config, r);

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].objective < runs[best].objective) best = r;
  Clustering out = std::move(runs[best]);

  // map canonical occurrence labels back to the caller's numbering
  std::vector<int> labels(w.size());
  for (std::size_t c = 0; c < order.size(); ++c) {
    const std::size_t i = order[c];
    for (std::size_t t = 0; t < static_cast<std::size_t>(w.multiplicity(i)); ++t)
      labels[w.offset(i) + t] = out.labels[canon.offset(c) + t];
  }
  out.labels = std::move(labels);

  if (static_cast<std::size_t>(k) > w.support_size()) {
    out.degenerate_order = true;
    warn(warnings, "k = " + std::to_string(k) + " exceeds the " + std::to_string(w.support_size()) +
                       " distinct points of the multiset; some centers coincide");
  }
  return out;
}

Clustering brute_force_k_cluster(const WeightedMultiset& w, int k, const Dissimilarity& spec) {
  const std::size_t n = w.support_size();
  if (n > 12 || k > 4) fail(ErrorKind::Guard, "brute force is limited to support <= 12 and k <= 4");
  if (k < 1 || static_cast<std::size_t>(k) > n)
    fail(ErrorKind::InvalidInput, "brute force needs 1 <= k <= |support(W)|");

  std::vector<UnitPoint> best_centers;
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + k, true);
  do {
    std::vector<UnitPoint> centers;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) centers.push_back(w.unit_point(i));
    const double obj = objective(w, centers, spec);
    if (obj < best) {
      best = obj;
      best_centers = centers;
    }
    const Assignment a = assign(w, centers, spec);
    auto updated = update_centers(w, a.labels, centers, spec);
    const double upd = objective(w, updated, spec);
    if (upd < best) {
      best = upd;
      best_centers = std::move(updated);
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));

  Clustering out;
  const Assignment a = assign(w, best_centers, spec);
  out.objective = assigned_objective(w, best_centers, a, spec);
  out.centers = std::move(best_centers);
  out.labels = a.labels;
  out.sizes = a.sizes;
  out.trace = {best};
  return out;
}

}  // namespace xclust
