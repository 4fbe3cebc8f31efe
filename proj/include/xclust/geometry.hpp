#pragma once

// Norms, points on the nonnegative unit sphere, semimetric dissimilarities,
// their duals and the ball-separation radii built from them.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "xclust/core.hpp"

namespace xclust {

struct NormSpec {
  enum class Kind { P, Sup };

  Kind kind = Kind::P;
  double p = 2.0;

  static NormSpec p_norm(double p);
  static NormSpec sup() { return {Kind::Sup, 0.0}; }

  /// Parses "p:<x>" or "sup".
  static NormSpec parse(const std::string& text);
  std::string to_string() const;

  /// p >= 1 or sup; only these norms may define a clustering sphere.
  bool convex() const noexcept { return kind == Kind::Sup || p >= 1.0; }

  friend bool operator==(const NormSpec&, const NormSpec&) = default;
};

double norm(std::span<const double> x, const NormSpec& spec);

inline constexpr double kSphereTolerance = 1e-12;

/// A point of the nonnegative orthant with unit norm under `sphere_norm`.
class UnitPoint {
 public:
  UnitPoint() = default;

  /// Validates nonnegativity and unit norm (within kSphereTolerance).
  UnitPoint(std::vector<double> coords, NormSpec sphere_norm);

  std::size_t dim() const noexcept { return coords_.size(); }
  const NormSpec& sphere_norm() const noexcept { return norm_; }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t j) const { return coords_[j]; }

  friend bool operator==(const UnitPoint&, const UnitPoint&) = default;

 private:
  std::vector<double> coords_;
  NormSpec norm_;
};

UnitPoint project_to_sphere(std::span<const double> x, const NormSpec& spec);
UnitPoint axis_point(std::size_t dim, std::size_t axis, const NormSpec& spec);

enum class DissimilarityKind { Cosine, PrincipalComponent, Custom };

/// A dissimilarity measure D on the sphere: symmetric, zero exactly on the
/// diagonal, valued in [0, 1].
class Dissimilarity {
 public:
  using Function =
      std::function<double(std::span<const double>, std::span<const double>)>;
  /// Optimal center of a weighted cluster; rows of `points` are cluster
  /// members, `weights` their multiplicities. The result is projected onto the
  /// sphere by the caller.
  using CenterFunction = std::function<std::vector<double>(
      const Matrix& points, std::span<const double> weights)>;

  static Dissimilarity cosine();
  static Dissimilarity principal_component();
  static Dissimilarity custom(std::string name, Function fn, NormSpec sphere,
                              CenterFunction center = {});
  /// "cos" or "pc".
  static Dissimilarity parse(const std::string& text);

  DissimilarityKind kind() const noexcept { return kind_; }
  const NormSpec& sphere_norm() const noexcept { return sphere_; }
  const std::string& name() const noexcept { return name_; }
  const CenterFunction& center_function() const noexcept { return center_; }

  /// Unchecked evaluation on raw coordinates.
  double operator()(std::span<const double> a, std::span<const double> b) const {
    switch (kind_) {
      case DissimilarityKind::Cosine: return clamp_unit(1.0 - dot(a, b));
      case DissimilarityKind::PrincipalComponent: {
        const double c = dot(a, b);
        return clamp_unit(1.0 - c * c);
      }
      case DissimilarityKind::Custom: break;
    }
    return fn_(a, b);
  }

  static double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
  }

 private:
  static double clamp_unit(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

  DissimilarityKind kind_ = DissimilarityKind::Cosine;
  NormSpec sphere_;
  std::string name_;
  Function fn_;
  CenterFunction center_;
};

/// Checked D(w1, w2): dimensions and sphere norms must agree with `spec`.
double dissimilarity(const Dissimilarity& spec, const UnitPoint& w1, const UnitPoint& w2);

/// Result of maximizing (or minimizing) over a finite sphere design. For
/// suprema the value is a lower bound of the exact supremum.
struct GridSup {
  double value = 0.0;
  std::size_t points = 0;  // number of sphere points evaluated
};

inline constexpr std::uint64_t kDefaultDesignSeed = 0x5eed5eedULL;

/// Deterministic quasi-uniform points on the nonnegative unit sphere: a
/// randomly shifted Halton sequence pushed through the half-normal quantile and
/// normalized, which is uniform on the orthant of the Euclidean sphere before
/// renormalization to `sphere`.
Matrix sphere_design(std::size_t dim, std::size_t count, const NormSpec& sphere,
                     std::uint64_t seed = kDefaultDesignSeed);

/// D†(w1, w2) = sup_w |D(w, w1) − D(w, w2)| over a design of `resolution`
/// points augmented with w1, w2, the axis points, the normalized midpoint and
/// (for the built-ins) the orthant-clamped extremal directions of the
/// difference. Non-decreasing in resolution; a lower bound of the exact value.
GridSup dual_dissimilarity(const Dissimilarity& spec, const UnitPoint& w1,
                           const UnitPoint& w2, std::size_t resolution);

/// Closed form of the cosine dual: max(‖(w1−w2)₊‖₂, ‖(w2−w1)₊‖₂).
double cosine_dual_exact(std::span<const double> w1, std::span<const double> w2);

/// inf_w max(D(a, w), D(b, w)): the largest radius for which the open D-balls
/// around a and b are disjoint. Closed form at the normalized midpoint for the
/// cosine dissimilarity; otherwise a grid minimum including the arc from a to b.
double pair_separation(const Dissimilarity& spec, const UnitPoint& a, const UnitPoint& b,
                       std::size_t resolution);

/// r_A: the minimum pair separation over distinct atoms (1 for a single atom).
double separation_radius(std::span<const UnitPoint> atoms, const Dissimilarity& spec,
                         std::size_t resolution);

/// r_A†(s) = sup { D†(a_i, w) : w ∈ B_D(a_i, s) }, estimated by walking from
/// each atom towards `resolution` design directions up to the ball boundary.
/// A lower bound of the exact supremum.
GridSup dual_radius(std::span<const UnitPoint> atoms, double s, const Dissimilarity& spec,
                    std::size_t resolution);

}  // namespace xclust
