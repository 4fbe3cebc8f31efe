#include "xclust/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "xclust/kernels.hpp"

namespace xclust {

NormSpec NormSpec::p_norm(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    fail(ErrorKind::InvalidInput, "p-norm exponent must be a positive finite number");
  return {Kind::P, p};
}

NormSpec NormSpec::parse(const std::string& text) {
  if (text == "sup" || text == "inf") return sup();
  if (text.rfind("p:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double p = std::stod(text.substr(2), &used);
      if (used + 2 == text.size()) return p_norm(p);
    } catch (const std::logic_error&) {
    }
  }
  fail(ErrorKind::InvalidInput, "cannot parse norm '" + text + "' (expected p:<x> or sup)");
}

std::string NormSpec::to_string() const {
  if (kind == Kind::Sup) return "sup";
  std::ostringstream os;
  os << "p:" << p;
  return os.str();
}

double norm(std::span<const double> x, const NormSpec& spec) {
  double acc = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "norm of a non-finite vector");
    const double a = std::abs(v);
    if (spec.kind == NormSpec::Kind::Sup) {
      acc = std::max(acc, a);
    } else if (spec.p == 1.0) {
      acc += a;
    } else if (spec.p == 2.0) {
      acc += a * a;
    } else {
      acc += std::pow(a, spec.p);
    }
  }
  if (spec.kind == NormSpec::Kind::Sup || spec.p == 1.0) return acc;
  if (spec.p == 2.0) return std::sqrt(acc);
  return std::pow(acc, 1.0 / spec.p);
}

UnitPoint::UnitPoint(std::vector<double> coords, NormSpec sphere_norm)
    : coords_(std::move(coords)), norm_(sphere_norm) {
  if (coords_.empty()) fail(ErrorKind::InvalidInput, "unit point needs at least one coordinate");
  if (!norm_.convex())
    fail(ErrorKind::InvalidInput, "sphere norms must be p-norms with p >= 1 or the sup-norm");
  for (double v : coords_)
    if (!(v >= 0.0)) fail(ErrorKind::InvalidInput, "unit point coordinates must be nonnegative");
  const double n = norm(coords_, norm_);
  if (std::abs(n - 1.0) > kSphereTolerance)
    fail(ErrorKind::InvalidInput, "point is not on the unit sphere of " + norm_.to_string());
}

UnitPoint project_to_sphere(std::span<const double> x, const NormSpec& spec) {
  for (double v : x)
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(ErrorKind::InvalidInput, "projection needs finite nonnegative coordinates");
  const double n = norm(x, spec);
  if (n == 0.0) fail(ErrorKind::DegenerateInput, "cannot project the zero vector onto the sphere");
  std::vector<double> c(x.begin(), x.end());
  for (double& v : c) v /= n;
  return UnitPoint(std::move(c), spec);
}

UnitPoint axis_point(std::size_t dim, std::size_t axis, const NormSpec& spec) {
  std::vector<double> c(dim, 0.0);
  c.at(axis) = 1.0;
  return UnitPoint(std::move(c), spec);
}

Dissimilarity Dissimilarity::cosine() {
  Dissimilarity d;
  d.kind_ = DissimilarityKind::Cosine;
  d.sphere_ = NormSpec::p_norm(2.0);
  d.name_ = "cos";
  return d;
}

Dissimilarity Dissimilarity::principal_component() {
  Dissimilarity d;
  d.kind_ = DissimilarityKind::PrincipalComponent;
  d.sphere_ = NormSpec::p_norm(2.0);
  d.name_ = "pc";
  return d;
}

Dissimilarity Dissimilarity::custom(std::string name, Function fn, NormSpec sphere,
                                    CenterFunction center) {
  if (!fn) fail(ErrorKind::InvalidInput, "custom dissimilarity needs a function");
  if (!sphere.convex())
    fail(ErrorKind::InvalidInput, "sphere norms must be p-norms with p >= 1 or the sup-norm");
  Dissimilarity d;
  d.kind_ = DissimilarityKind::Custom;
  d.sphere_ = sphere;
  d.name_ = std::move(name);
  d.fn_ = std::move(fn);
  d.center_ = std::move(center);
  return d;
}

Dissimilarity Dissimilarity::parse(const std::string& text) {
  if (text == "cos") return cosine();
  if (text == "pc") return principal_component();
  fail(ErrorKind::InvalidInput, "unknown dissimilarity '" + text + "' (expected cos or pc)");
}

double dissimilarity(const Dissimilarity& spec, const UnitPoint& w1, const UnitPoint& w2) {
  if (w1.dim() != w2.dim()) fail(ErrorKind::InvalidInput, "dissimilarity of points of different dimension");
  if (!(w1.sphere_norm() == spec.sphere_norm()) || !(w2.sphere_norm() == spec.sphere_norm()))
    fail(ErrorKind::InvalidInput,
         "dissimilarity '" + spec.name() + "' is defined on the " + spec.sphere_norm().to_string() +
             " sphere");
  return spec(w1.coords(), w2.coords());
}

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base;
  double scale = inv;
  double out = 0.0;
  while (index > 0) {
    out += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv;
  }
  return out;
}

void check_same_sphere(const Dissimilarity& spec, std::span<const UnitPoint> pts) {
  for (const auto& p : pts) {
    if (p.dim() != pts.front().dim())
      fail(ErrorKind::InvalidInput, "points of different dimension");
    if (!(p.sphere_norm() == spec.sphere_norm()))
      fail(ErrorKind::InvalidInput, "point sphere does not match the dissimilarity's sphere");
  }
}

void append_normalized(Matrix& out, std::vector<double> v, const NormSpec& sphere) {
  for (double& x : v) x = std::max(0.0, x);
  const double n = norm(v, sphere);
  if (!(n > 0.0)) return;
  for (double& x : v) x /= n;
  out.append_row(v);
}

// Points where |D(·, w1) − D(·, w2)| tends to peak: the arguments themselves,
// the axes, the midpoint, and for the Euclidean built-ins the orthant-clamped
// directions along ±(w1 − w2) and the eigenvectors of w1w1ᵀ − w2w2ᵀ. For the
// cosine dissimilarity the clamped difference is the exact maximizer.
Matrix dual_candidates(const Dissimilarity& spec, std::span<const double> w1,
                       std::span<const double> w2) {
  const std::size_t d = w1.size();
  const NormSpec& sphere = spec.sphere_norm();
  Matrix out(0, d);
  out.append_row(w1);
  out.append_row(w2);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> e(d, 0.0);
    e[j] = 1.0;
    out.append_row(e);
  }
  std::vector<double> mid(d), diff(d), ndiff(d);
  for (std::size_t j = 0; j < d; ++j) {
    mid[j] = w1[j] + w2[j];
    diff[j] = w1[j] - w2[j];
    ndiff[j] = -diff[j];
  }
  append_normalized(out, mid, sphere);
  append_normalized(out, diff, sphere);
  append_normalized(out, ndiff, sphere);

  if (spec.kind() != DissimilarityKind::Custom) {
    const double c = Dissimilarity::dot(w1, w2);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (s > 1e-15) {
      // basis e = w1, f = (w2 − c w1)/s; eigenvectors (c, s ∓ 1) for eigenvalues ±s
      const double coef[2][2] = {{c, s - 1.0}, {c, s + 1.0}};
      for (const auto& xy : coef) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> v(d);
          for (std::size_t j = 0; j < d; ++j) {
            const double f = (w2[j] - c * w1[j]) / s;
            v[j] = sign * (xy[0] * w1[j] + xy[1] * f);
          }
          append_normalized(out, v, sphere);
        }
      }
    }
  }
  return out;
}

double dual_on(const Dissimilarity& spec, const Matrix& design, std::span<const double> w1,
               std::span<const double> w2) {
  const Matrix extra = dual_candidates(spec, w1, w2);
  return std::max(kernels::grid_max_abs_diff_serial(extra, w1, w2, spec),
                  kernels::grid_max_abs_diff_serial(design, w1, w2, spec));
}

std::vector<double> blend(std::span<const double> a, std::span<const double> u, double lambda,
                          const NormSpec& sphere) {
  std::vector<double> w(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) w[j] = (1.0 - lambda) * a[j] + lambda * u[j];
  const double n = norm(w, sphere);
  for (double& x : w) x /= n;
  return w;
}

}  // namespace

Matrix sphere_design(std::size_t dim, std::size_t count, const NormSpec& sphere,
                     std::uint64_t seed) {
  if (dim == 0) fail(ErrorKind::InvalidInput, "sphere design needs dim >= 1");
  if (!sphere.convex()) fail(ErrorKind::InvalidInput, "sphere design needs a convex norm");
  const auto primes = first_primes(dim);
  Rng rng(seed);
  std::vector<double> shift(dim);
  for (double& s : shift) s = uniform_open(rng);

  Matrix out(count, dim);
  std::vector<double> g(dim);
  std::size_t filled = 0;
  for (std::uint64_t index = 1; filled < count; ++index) {
    for (std::size_t j = 0; j < dim; ++j) {
      double u = radical_inverse(index, primes[j]) + shift[j];
      u -= std::floor(u);
      g[j] = std::sqrt(2.0) * boost::math::erf_inv(u);
    }
    const double n = norm(g, sphere);
    if (!(n > 0.0)) continue;
    auto row = out.row(filled++);
    for (std::size_t j = 0; j < dim; ++j) row[j] = g[j] / n;
  }
  return out;
}

double cosine_dual_exact(std::span<const double> w1, std::span<const double> w2) {
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t j = 0; j < w1.size(); ++j) {
    const double v = w1[j] - w2[j];
    if (v > 0.0) pos += v * v; else neg += v * v;
  }
  return std::min(1.0, std::sqrt(std::max(pos, neg)));
}

GridSup dual_dissimilarity(const Dissimilarity& spec, const UnitPoint& w1, const UnitPoint& w2,
                           std::size_t resolution) {
  if (resolution < 2) fail(ErrorKind::InvalidInput, "dual dissimilarity needs resolution >= 2");
  const UnitPoint pair[] = {w1, w2};
  check_same_sphere(spec, pair);
  if (w1 == w2) return {0.0, 0};
  const Matrix design = sphere_design(w1.dim(), resolution, spec.sphere_norm());
  const Matrix extra = dual_candidates(spec, w1.coords(), w2.coords());
  const double v = std::max(kernels::grid_max_abs_diff(design, w1.coords(), w2.coords(), spec),
                            kernels::grid_max_abs_diff_serial(extra, w1.coords(), w2.coords(), spec));
  return {v, design.rows() + extra.rows()};
}

double pair_separation(const Dissimilarity& spec, const UnitPoint& a, const UnitPoint& b,
                       std::size_t resolution) {
  const UnitPoint pair[] = {a, b};
  check_same_sphere(spec, pair);
  if (a == b) fail(ErrorKind::InvalidInput, "pair separation of identical atoms");
  if (spec.kind() == DissimilarityKind::Cosine) {
    const double c = std::min(1.0, Dissimilarity::dot(a.coords(), b.coords()));
    return 1.0 - std::sqrt((1.0 + c) / 2.0);
  }
  const NormSpec& sphere = spec.sphere_norm();
  constexpr int kArcSteps = 256;
  Matrix arc(0, a.dim());
  for (int i = 0; i <= kArcSteps; ++i)
    arc.append_row(blend(a.coords(), b.coords(), static_cast<double>(i) / kArcSteps, sphere));
  double best = kernels::grid_min_max_serial(arc, a.coords(), b.coords(), spec);
  if (resolution > 0) {
    const Matrix design = sphere_design(a.dim(), resolution, sphere);
    best = std::min(best, kernels::grid_min_max(design, a.coords(), b.coords(), spec));
  }
  return best;
}

double separation_radius(std::span<const UnitPoint> atoms, const Dissimilarity& spec,
                         std::size_t resolution) {
  if (atoms.empty()) fail(ErrorKind::InvalidInput, "separation radius needs at least one atom");
  check_same_sphere(spec, atoms);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (atoms[i] == atoms[j]) fail(ErrorKind::InvalidInput, "duplicate atoms");
  if (atoms.size() == 1) return 1.0;
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      r = std::min(r, pair_separation(spec, atoms[i], atoms[j], resolution));
  return r;
}

GridSup dual_radius(std::span<const UnitPoint> atoms, double s, const Dissimilarity& spec,
                    std::size_t resolution) {
  if (atoms.empty()) fail(ErrorKind::InvalidInput, "dual radius needs at least one atom");
  if (!(s > 0.0)) fail(ErrorKind::InvalidInput, "dual radius needs s > 0");
  if (resolution < 1) fail(ErrorKind::InvalidInput, "dual radius needs resolution >= 1");
  check_same_sphere(spec, atoms);
  const std::size_t d = atoms.front().dim();
  const NormSpec& sphere = spec.sphere_norm();

  Matrix directions = sphere_design(d, resolution, sphere);
  for (std::size_t j = 0; j < d; ++j) directions.append_row(axis_point(d, j, sphere).coords());
  for (const auto& a : atoms) directions.append_row(a.coords());

  const bool exact = spec.kind() == DissimilarityKind::Cosine;
  const Matrix inner =
      exact ? Matrix(0, d) : sphere_design(d, std::min<std::size_t>(resolution, 1024), sphere, kDefaultDesignSeed + 1);
  auto dual = [&](std::span<const double> a, std::span<const double> w) {
    return exact ? cosine_dual_exact(a, w) : dual_on(spec, inner, a, w);
  };

  constexpr double kFractions[] = {0.25, 0.5, 0.75, 1.0};
  double best = 0.0;
  const auto rays = static_cast<std::ptrdiff_t>(directions.rows());
  for (const auto& atom : atoms) {
    const auto a = atom.coords();
#pragma omp parallel for schedule(dynamic, 64) reduction(max : best)
    for (std::ptrdiff_t r = 0; r < rays; ++r) {
      const auto u = directions.row(static_cast<std::size_t>(r));
      // largest λ with D(a, w(λ)) < s; D is taken to increase along the segment
      double lambda = 1.0;
      if (!(spec(a, blend(a, u, 1.0, sphere)) < s)) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (spec(a, blend(a, u, mid, sphere)) < s ? lo : hi) = mid;
        }
        lambda = lo;
      }
      if (lambda <= 0.0) continue;
      for (double f : kFractions) {
        const auto w = blend(a, u, f * lambda, sphere);
        if (spec(a, w) < s) best = std::max(best, dual(a, w));
      }
    }
  }
  return {best, directions.rows() * atoms.size()};
}

}  // namespace xclust
