#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "reference_model.hpp"
#include "support.hpp"
#include "xclust/factor_models.hpp"

using namespace xclust;
using namespace xclust::testing;

namespace {

const NormSpec kOne = NormSpec::p_norm(1.0);

Matrix matrix(std::vector<std::vector<double>> rows) {
  Matrix m(0, rows.front().size());
  for (const auto& r : rows) m.append_row(r);
  return m;
}

}  // namespace

TEST_CASE("coefficient validation") {
  FactorCoefficients ok{matrix({{0.3, 0.7}, {1.0, 0.0}}), 1.0};
  CHECK_NOTHROW(ok.validate());
  FactorCoefficients bad{matrix({{0.3, 0.7}, {0.5, 0.6}}), 1.0};
  try {
    bad.validate();
    FAIL("row constraint violation accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  FactorCoefficients zero_col{matrix({{1.0, 0.0}, {1.0, 0.0}}), 1.0};
  CHECK_THROWS(zero_col.validate());
  FactorCoefficients same{matrix({{0.5, 0.5}, {0.5, 0.5}}), 1.0};
  CHECK_THROWS(same.validate());
  FactorCoefficients heavy_noise = ok;
  heavy_noise.noise = {true, 0.5, 1.0};
  CHECK_THROWS(heavy_noise.validate());
}

TEST_CASE("simulation") {
  FactorCoefficients id{matrix({{1, 0}, {0, 1}}), 2.0};
  const DataMatrix x = simulate(id, 2000, 4);
  CHECK(x.rows() == 2000);
  CHECK(x.column_names == std::vector<std::string>{"x1", "x2"});
  // standard 2-Fréchet margin: P(X <= 1) = e^{-1}
  double below = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) below += x.values(i, 0) <= 1.0;
  CHECK(below / 2000 == doctest::Approx(std::exp(-1.0)).epsilon(0.1));

  FactorCoefficients single{matrix({{1}, {1}, {1}}), 1.0};
  const DataMatrix s = simulate(single, 100, 1);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    CHECK(s.values(i, 0) == s.values(i, 1));
    CHECK(s.values(i, 1) == s.values(i, 2));
  }
  CHECK(simulate(id, 500, 9).values == simulate(id, 500, 9).values);
  CHECK(simulate(id, 500, 9).values != simulate(id, 500, 10).values);
}

TEST_CASE("regularly varying tail at alpha 1") {
  for (auto type : {ModelType::MaxLinear, ModelType::SumLinear}) {
    FactorCoefficients m{matrix({{0.4, 0.6}, {0.9, 0.1}}), 1.0, type};
    const DataMatrix x = simulate(m, 1000000, 17);
    for (std::size_t j = 0; j < 2; ++j) {
      double above = 0;
      for (std::size_t i = 0; i < x.rows(); ++i) above += x.values(i, j) > 100.0;
      CHECK(above / 1e6 * 100.0 == doctest::Approx(1.0).epsilon(0.15));
    }
  }
}

TEST_CASE("spectral measure of the coefficients") {
  const SpectralEstimate s = spectral_from_coefficients(matrix({{1, 0}, {0, 1}}), 1.0, kOne, kOne);
  CHECK(s.probs == std::vector<double>{0.5, 0.5});
  CHECK(s.atoms[0] == axis_point(2, 0, kOne));

  const Matrix b = matrix({{0.2, 0.8, 0.1}, {0.5, 0.1, 0.9}, {0.3, 0.3, 0.0}});
  Matrix scaled = b;
  for (double& v : scaled.data()) v *= 7.5;
  const auto a = spectral_from_coefficients(b, 1.5, kTwo, kTwo);
  const auto c = spectral_from_coefficients(scaled, 1.5, kTwo, kTwo);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(a.probs[j] == doctest::Approx(c.probs[j]).epsilon(1e-14));
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.atoms[j][i] == doctest::Approx(c.atoms[j][i]).epsilon(1e-14));
  }
}

TEST_CASE("six-atom measure round trip") {
  const SpectralEstimate reference = six_atom_measure();
  const Matrix raw = coefficients_from_spectral(reference, 1.0, 6);
  const SpectralEstimate back = spectral_from_coefficients(raw, 1.0, kOne, kTwo);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(std::abs(back.probs[j] - reference.probs[j]) < 0.01);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(back.atoms[j][i] - reference.atoms[j][i]) < 0.01);
  }
  CHECK_NOTHROW(six_atom_model().validate());
}

TEST_CASE("coefficients from spectral") {
  SpectralEstimate a2{{unit({0.74, 0.0, 0.59, 0.0, 0.32, 0.0})}, {0.10}};
  const Matrix b = coefficients_from_spectral(a2, 1.0, 6);
  const std::vector<double> expected{0.74 * 0.6 / 1.65, 0, 0.59 * 0.6 / 1.65, 0, 0.32 * 0.6 / 1.65, 0};
  for (std::size_t i = 0; i < 6; ++i) CHECK(b(i, 0) == doctest::Approx(expected[i]).epsilon(1e-12));
  CHECK(b(0, 0) == doctest::Approx(0.26909).epsilon(1e-4));
  CHECK(b(2, 0) == doctest::Approx(0.21455).epsilon(1e-4));
  CHECK(b(4, 0) == doctest::Approx(0.11636).epsilon(1e-4));

  SpectralEstimate single{{unit({0.3, 0.4, 0.5})}, {1.0}};
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    const Matrix m = coefficients_from_spectral(single, alpha, 3);
    double mass = 0.0;
    for (std::size_t i = 0; i < 3; ++i) mass += std::pow(m(i, 0), alpha);
    CHECK(mass == doctest::Approx(3.0).epsilon(1e-13));
  }
}

TEST_CASE("row normalization") {
  const FactorCoefficients r = row_normalize(matrix({{3, 4}, {1, 0}}), 2.0);
  CHECK(r.b(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(r.b(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    Matrix m(4, 3);
    for (double& v : m.data()) v = u(rng);
    const double alpha = 0.5 + 0.1 * i;
    const FactorCoefficients once = row_normalize(m, alpha);
    const FactorCoefficients twice = row_normalize(once.b, alpha);
    CHECK(once.b == twice.b);
  }
  try {
    row_normalize(matrix({{1, 1}, {0, 0}}), 1.0);
    FAIL("zero row accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateResult);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("exact inversion under alpha-norm spheres") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scheme scheme = static_cast<Scheme>(seed % 4);
    const FactorCoefficients truth = random_model(scheme, seed).model;
    const NormSpec a = NormSpec::p_norm(truth.alpha);
    const Matrix back = coefficients_from_spectral(spectral_from_coefficients(truth, a, a),
                                                   truth.alpha, truth.d());
    for (std::size_t i = 0; i < back.data().size(); ++i)
      CHECK(std::abs(back.data()[i] - truth.b.data()[i]) < 1e-10);

    // 2-norm atoms: the α-norm is recomputed internally, masses need the α-norm radius
    const Matrix via_two = coefficients_from_spectral(spectral_from_coefficients(truth, a, kTwo),
                                                      truth.alpha, truth.d());
    const FactorCoefficients normalized = row_normalize(via_two, truth.alpha);
    CHECK(match_columns(normalized.b, truth.b).max_entry_error < 1e-9);
  }
}

TEST_CASE("column permutation carries over to atoms") {
  const FactorCoefficients m = random_model(Scheme::D4K6, 3).model;
  Matrix p(m.d(), m.k());
  const std::vector<std::size_t> perm{5, 3, 1, 0, 2, 4};
  for (std::size_t i = 0; i < m.d(); ++i)
    for (std::size_t j = 0; j < m.k(); ++j) p(i, j) = m.b(i, perm[j]);
  const auto a = spectral_from_coefficients(m, kTwo, kTwo);
  const auto b = spectral_from_coefficients(p, m.alpha, kTwo, kTwo);
  for (std::size_t j = 0; j < m.k(); ++j) {
    CHECK(b.probs[j] == a.probs[perm[j]]);
    CHECK(b.atoms[j] == a.atoms[perm[j]]);
  }
  const ColumnMatch cm = match_columns(p, m.b);
  CHECK(cm.max_entry_error == 0.0);
  for (std::size_t j = 0; j < m.k(); ++j) CHECK(perm[static_cast<std::size_t>(cm.permutation[j])] == j);
}

TEST_CASE("random models") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (auto scheme : {Scheme::D4K2, Scheme::D4K6, Scheme::D6K6, Scheme::D10K6}) {
      const RandomModel r = random_model(scheme, seed);
      CHECK_NOTHROW(r.model.validate());
      CHECK(r.model.d() == dimension(scheme));
      CHECK(static_cast<int>(r.model.k()) == true_order(scheme));
      CHECK(r.model.alpha == 1.0);
    }
    const FactorCoefficients d4k2 = random_model(Scheme::D4K2, seed).model;
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(d4k2.b(i, 0) <= 0.5);
      CHECK(d4k2.b(i, 1) >= 0.5);
      CHECK(d4k2.b(i, 1) == 1.0 - d4k2.b(i, 0));
    }
    // factors 2..5 load on pairs and one block of four coordinates
    const FactorCoefficients d10 = random_model(Scheme::D10K6, seed).model;
    const std::vector<std::vector<std::size_t>> support{{0, 1}, {2, 3}, {4, 5}, {6, 7, 8, 9}};
    for (std::size_t f = 0; f < 4; ++f) {
      for (std::size_t i = 0; i < 10; ++i) {
        const bool on = std::find(support[f].begin(), support[f].end(), i) != support[f].end();
        if (!on) CHECK(d10.b(i, f + 1) == 0.0);
      }
    }
  }
  CHECK(random_model(Scheme::D6K6, 4).model.b == random_model(Scheme::D6K6, 4).model.b);
  CHECK(parse_scheme("d10k6") == Scheme::D10K6);
  CHECK_THROWS(parse_scheme("d3k3"));
}

TEST_CASE("dominant factor") {
  CHECK(dominant_factor(matrix({{0.2, 0.8}, {0.5, 0.5}, {0.9, 0.1}})) == std::vector<int>{1, 0, 0});
}
