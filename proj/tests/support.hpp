#pragma once

// Hand-rolled generators for the property tests.

#include <cmath>
#include <random>
#include <vector>

#include "xclust/clustering.hpp"
#include "xclust/core.hpp"
#include "xclust/geometry.hpp"

namespace xclust::testing {

inline const NormSpec kTwo = NormSpec::p_norm(2.0);

/// Uniform on the nonnegative part of the Euclidean sphere, then renormalized.
inline UnitPoint random_point(Rng& rng, std::size_t d, const NormSpec& sphere = kTwo) {
  std::normal_distribution<double> g;
  std::vector<double> v(d);
  double s = 0.0;
  do {
    s = 0.0;
    for (double& x : v) {
      x = std::abs(g(rng));
      s += x;
    }
  } while (!(s > 0.0));
  return project_to_sphere(v, sphere);
}

/// A point within roughly `spread` (in angle) of `center`.
inline UnitPoint jitter(Rng& rng, const UnitPoint& center, double spread) {
  std::normal_distribution<double> g(0.0, spread);
  std::vector<double> v(center.coords().begin(), center.coords().end());
  for (double& x : v) x = std::max(0.0, x + g(rng));
  return project_to_sphere(v, center.sphere_norm());
}

inline UnitPoint unit(std::vector<double> v, const NormSpec& sphere = kTwo) {
  return project_to_sphere(v, sphere);
}

inline UnitPoint axis(std::size_t d, std::size_t i) { return axis_point(d, i, kTwo); }

/// Small random multiset: `support` distinct points with multiplicities 1..3.
inline WeightedMultiset random_multiset(Rng& rng, std::size_t d, std::size_t support) {
  std::vector<UnitPoint> pts;
  std::vector<int> mult;
  std::uniform_int_distribution<int> m(1, 3);
  for (std::size_t i = 0; i < support; ++i) {
    pts.push_back(random_point(rng, d));
    mult.push_back(m(rng));
  }
  return WeightedMultiset::from_points(pts, mult);
}

inline WeightedMultiset multiset(std::vector<UnitPoint> pts, std::vector<int> mult) {
  return WeightedMultiset::from_points(pts, mult);
}

}  // namespace xclust::testing
