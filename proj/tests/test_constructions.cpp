#include "barabanov/constructions.hpp"
#include "barabanov/error.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace barabanov;
using testing::mat2;

namespace {

double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  auto one_sided = [](const std::vector<Vec2>& x, const std::vector<Vec2>& y) {
    double out = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) best = std::min(best, (p - q).norm());
      out = std::max(out, best);
    }
    return out;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

std::vector<Vec2> rotated(const std::vector<Vec2>& v, const Matrix& r) {
  std::vector<Vec2> out;
  for (const auto& p : v) out.push_back(r * p);
  return out;
}

std::vector<PolygonNorm> seed_polygons(std::int64_t k) {
  std::vector<PolygonNorm> out;
  for (auto& [name, p] : standard_seeds(k)) out.push_back(p);
  return out;
}

}  // namespace

TEST_CASE("example1") {
  SUBCASE("quarter turn") {
    const auto s = example1(AngleSpec::rational_pi(1, 2));
    REQUIRE(s.size() == 2);
    CHECK(s[0] == mat2(1, 0, 0, 0));
    CHECK(s[1] == mat2(0, -1, 1, 0));
    CHECK(s.rotation_angle(1) == AngleSpec::rational_pi(1, 2));
    CHECK_FALSE(s.rotation_angle(0).has_value());
  }
  SUBCASE("integer theta rejected") {
    CHECK_THROWS_AS(example1(AngleSpec::rational_pi(2, 1)), std::invalid_argument);
    CHECK_THROWS_AS(example1(AngleSpec::rational_pi(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(example1(AngleSpec::rational_pi(0, 1)), std::invalid_argument);
  }
  SUBCASE("irrational theta matches trig") {
    const auto s = example1(AngleSpec::from_radians(std::sqrt(2.0) * std::numbers::pi, true));
    const auto o = oracle::M2::rotation(oracle::kPi * sqrtl(2.0L));
    CHECK(std::abs(s[1](0, 0) - static_cast<double>(o.a)) <= 1e-15);
    CHECK(std::abs(s[1](0, 1) - static_cast<double>(o.b)) <= 1e-15);
    CHECK(std::abs(s[1](1, 0) - static_cast<double>(o.c)) <= 1e-15);
    CHECK(std::abs(s[1](1, 1) - static_cast<double>(o.d)) <= 1e-15);
  }
}

TEST_CASE("example2_truncation") {
  const auto one = example2_truncation(1);
  REQUIRE(one.size() == 2);
  CHECK(one[0] == Matrix::Identity(2, 2));
  CHECK(one[1] == mat2(0, -1, 1, 0));
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto s = example2_truncation(n);
    CHECK(s.size() == n + 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK((s[i].transpose() * s[i] - Matrix::Identity(2, 2)).norm() <= 1e-14);
      CHECK(std::abs(s[i].determinant() - 1.0) <= 1e-14);
    }
  }
  const auto three = example2_truncation(3);
  CHECK(three.rotation_angle(1) == AngleSpec::rational_pi(1, 2));
  CHECK(three.rotation_angle(2) == AngleSpec::rational_pi(1, 4));
  CHECK(three.rotation_angle(3) == AngleSpec::rational_pi(1, 8));
  CHECK_THROWS_AS(example2_truncation(0), std::invalid_argument);
}

TEST_CASE("projection_family") {
  const std::vector<AngleSpec> x{AngleSpec::rational_pi(0, 1)};
  CHECK(projection_family(x)[0] == mat2(1, 0, 0, 0));
  const std::vector<AngleSpec> xy{AngleSpec::rational_pi(0, 1), AngleSpec::rational_pi(1, 2)};
  const auto s = projection_family(xy);
  CHECK(s[0] == mat2(1, 0, 0, 0));
  CHECK(s[1] == mat2(0, 0, 0, 1));
  const std::vector<AngleSpec> many{AngleSpec::rational_pi(1, 3), AngleSpec::rational_pi(2, 7),
                                    AngleSpec::from_radians(0.123)};
  const MatrixSet ps = projection_family(many);
  for (const auto& p : ps.matrices()) {
    CHECK((p * p - p).norm() <= 1e-14);
    CHECK((p - p.transpose()).norm() <= 1e-14);
    CHECK(std::abs(p.trace() - 1.0) <= 1e-14);
  }
  CHECK_THROWS_AS(projection_family(std::vector<AngleSpec>{}), std::invalid_argument);
}

TEST_CASE("invariant_norm_family examples") {
  SUBCASE("square under a quarter turn") {
    const std::vector<PolygonNorm> seeds{PolygonNorm::square()};
    const auto fam = invariant_norm_family(4, 1, seeds, false);
    REQUIRE(fam.norms.size() == 1);
    CHECK(fam.norms[0].size() == 4);
    CHECK(norm_distance(fam.norms[0], PolygonNorm::square(), Vec2::UnitX()) <= 1e-12);
  }
  SUBCASE("disc under eighth turns") {
    const std::vector<PolygonNorm> seeds{PolygonNorm::euclidean(720)};
    const auto fam = invariant_norm_family(8, 1, seeds, false);
    REQUIRE(fam.norms.size() == 1);
    CHECK(norm_distance(fam.norms[0], PolygonNorm::euclidean(720), Vec2::UnitX()) <= 1e-12);
  }
  SUBCASE("vertical tangents against example1 with theta = 1/2") {
    const std::vector<PolygonNorm> seeds{PolygonNorm::square(), PolygonNorm::euclidean(720)};
    const MatrixSet ex = example1(AngleSpec::rational_pi(1, 2));
    const auto fam = invariant_norm_family(4, 2, seeds, true, &ex, 1.0);
    REQUIRE(fam.norms.size() >= 2);
    for (std::size_t i = 0; i < fam.norms.size(); ++i) {
      CHECK(fam.residuals[i] <= 1e-9);
      CHECK(residual(ex, 1.0, fam.norms[i]).max_residual <= 1e-9);
      for (std::size_t j = i + 1; j < fam.norms.size(); ++j)
        CHECK(norm_distance(fam.norms[i], fam.norms[j], Vec2::UnitX()) >= 0.05);
    }
  }
  SUBCASE("too few distinct bodies") {
    const std::vector<PolygonNorm> seeds{PolygonNorm::square(), PolygonNorm::square().scaled(3.0)};
    CHECK_THROWS_AS(invariant_norm_family(4, 2, seeds, false), CertificationError);
  }
  SUBCASE("uncertifiable bodies") {
    const std::vector<PolygonNorm> seeds{PolygonNorm::square()};
    const MatrixSet rot({make_rotation(AngleSpec::rational_pi(1, 3))});
    CHECK_THROWS_AS(invariant_norm_family(4, 1, seeds, false, &rot, 1.0), CertificationError);
  }
}

TEST_CASE("invariant bodies are exactly group invariant") {
  for (std::int64_t k : {3, 4, 6, 8, 16}) {
    const auto fam = invariant_norm_family(k, 2, seed_polygons(k), false);
    const Matrix r = make_rotation(AngleSpec::rational_pi(2, k));
    for (const auto& p : fam.norms) CHECK(hausdorff(rotated(p.vertices(), r), p.vertices()) <= 1e-12);
    const auto tangent = invariant_norm_family(k, 2, seed_polygons(k), true);
    for (const auto& p : tangent.norms) CHECK(hausdorff(rotated(p.vertices(), r), p.vertices()) <= 1e-12);
  }
}

TEST_CASE("supporting slabs give a vertical tangent on the axis") {
  const auto body = with_supporting_slabs(group_closure(PolygonNorm::euclidean(720), 4), Vec2::UnitX(), 4);
  const MatrixSet proj({mat2(1, 0, 0, 0)});
  std::mt19937_64 rng(51);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 v(n(rng), n(rng));
    CHECK(body.gauge(Vec2(v.x(), 0.0)) <= body.gauge(v) * (1 + 1e-12));
  }
  CHECK(residual(proj, 1.0, body).max_excess <= 1e-12);
}

TEST_CASE("eigen_frame examples") {
  SUBCASE("rotation gives the identity frame") {
    const auto f = eigen_frame(make_rotation(AngleSpec::rational_pi(1, 3)));
    CHECK((f.s - Matrix::Identity(2, 2)).norm() <= 1e-15);
    CHECK(f.rho == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.angle == doctest::Approx(std::numbers::pi / 3).epsilon(1e-15));
  }
  SUBCASE("scaled quarter turn in a stretched frame") {
    const Matrix b = mat2(0, -4, 1, 0);
    const auto f = eigen_frame(b);
    CHECK(f.rho == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(f.angle == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK((f.s - mat2(0, 2, -1, 0)).norm() <= 1e-15);
    CHECK((f.s.inverse() * b * f.s - 2.0 * make_rotation(AngleSpec::rational_pi(1, 2))).norm() <= 1e-14);
    // Largest component real and positive, the other of unit modulus.
    CHECK(f.eigenvector(0).imag() == 0.0);
    CHECK(f.eigenvector(0).real() > 0.0);
    CHECK(std::abs(std::abs(f.eigenvector(1)) - 1.0) <= 1e-15);
  }
  SUBCASE("real spectrum") {
    CHECK_THROWS_AS(eigen_frame(mat2(2, 0, 0, 3)), NotInPerturbationSetError);
    CHECK_THROWS_AS(eigen_frame(mat2(1, 1, 0, 1)), NotInPerturbationSetError);
  }
}

TEST_CASE("eigen_frame conjugation identity on random matrices") {
  std::mt19937_64 rng(52);
  int tested = 0;
  while (tested < 100) {
    const Matrix b = testing::random_matrix(rng, 2);
    const double disc = b.trace() * b.trace() - 4 * b.determinant();
    if (!(disc < -0.1)) continue;
    ++tested;
    const auto f = eigen_frame(b);
    CHECK(f.eigenvalue.imag() > 0.0);
    CHECK(f.angle > 0.0);
    CHECK(f.angle < std::numbers::pi);
    const Matrix lhs = f.s.inverse() * b * f.s;
    const Matrix rhs = f.rho * make_rotation(AngleSpec::from_radians(f.angle));
    CHECK((lhs - rhs).norm() <= 1e-10 * f.rho);
  }
}

TEST_CASE("c_norm") {
  SUBCASE("rotation frame gives the disc") {
    const auto f = eigen_frame(make_rotation(AngleSpec::rational_pi(1, 3)));
    CHECK(norm_distance(c_norm(f), PolygonNorm::euclidean(720), Vec2::UnitX()) <= 1e-12);
  }
  SUBCASE("stretched frame gives a 2:1 ellipse") {
    const auto f = eigen_frame(mat2(0, -4, 1, 0));
    const auto e = c_norm(f);
    CHECK(e.gauge(Vec2(2, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.gauge(Vec2(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c_norm_value(f, Vec2(2, 0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c_norm_value(f, Vec2(0, 1)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.gauge(Vec2(f.s.col(0))) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("round trip") {
    std::mt19937_64 rng(53);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      Matrix b;
      do b = testing::random_matrix(rng, 2);
      while (!(b.trace() * b.trace() - 4 * b.determinant() < -0.1));
      const auto f = eigen_frame(b);
      const auto poly = c_norm(f);
      // Exact at the polygon's defining directions.
      for (double phi : angle_grid(720)) {
        const Vec2 u = unit_vector(phi);
        CHECK(std::abs(poly.gauge(Vec2(f.s * u)) - 1.0) <= 1e-9);
      }
      // Between them, within the inscription bound sec(pi/720).
      const double inscription = 1.0 / std::cos(std::numbers::pi / 720) - 1.0;
      for (int j = 0; j < 100; ++j) {
        const Vec2 u(n(rng), n(rng));
        const double g = poly.gauge(Vec2(f.s * u));
        CHECK(g >= u.norm() * (1 - 1e-12));
        CHECK(g <= u.norm() * (1 + inscription + 1e-12));
        CHECK(testing::rel_err(c_norm_value(f, Vec2(f.s * u)), u.norm()) <= 1e-12);
      }
    }
  }
}

TEST_CASE("perturbation_pair") {
  const Matrix b1 = mat2(0.5, 0, 0, 0);
  const Matrix b2 = make_rotation(AngleSpec::rational_pi(1, 2));
  SUBCASE("diag(1/2, 0) with a quarter turn and the square companion") {
    const auto p = perturbation_pair(b1, b2, PolygonNorm::square(), AngleSpec::rational_pi(1, 2));
    CHECK(std::abs(p.xi - 0.5) <= 1e-12);
    CHECK(std::abs(p.k_const - std::sqrt(2.0)) <= 1e-9);
    CHECK(std::abs(p.kappa_max - 1.0 / std::sqrt(2.0)) <= 1e-9);
    CHECK(p.b1_c_norm == doctest::Approx(0.5));
  }
  SUBCASE("hexagon companion") {
    const auto p = perturbation_pair(b1, make_rotation(AngleSpec::rational_pi(1, 3)), PolygonNorm::regular(6));
    // Hexagon gauge vs Euclidean: 1 at vertices, 2/sqrt(3) at edge midpoints.
    CHECK(std::abs(p.k_const - 2.0 / std::sqrt(3.0)) <= 1e-12);
  }
  SUBCASE("membership errors") {
    CHECK_THROWS_AS(perturbation_pair(Matrix::Zero(2, 2), b2, PolygonNorm::square()), NotInPerturbationSetError);
    CHECK_THROWS_AS(perturbation_pair(2.0 * Matrix::Identity(2, 2), b2, PolygonNorm::square()),
                    NotInPerturbationSetError);
    CHECK_THROWS_AS(perturbation_pair(b1, mat2(2, 0, 0, 1), PolygonNorm::square()), NotInPerturbationSetError);
  }
}

TEST_CASE("kappa_family") {
  const Matrix b1 = mat2(0.5, 0, 0, 0);
  const auto angle = AngleSpec::rational_pi(1, 2);
  const Matrix b2 = make_rotation(angle);
  const auto sq = PolygonNorm::square();
  const auto pair = perturbation_pair(b1, b2, sq, angle);
  const MatrixSet both({b1, b2});

  SUBCASE("kappa = 0.3 is certified") {
    const std::vector<double> ks{0.3};
    const auto fam = kappa_family(pair, sq, ks);
    REQUIRE(fam.size() == 1);
    CHECK(fam[0].residual <= 1e-9);
    CHECK(residual(both, 1.0, fam[0].polygon).max_residual <= 1e-9);
    CHECK(fam[0].margin > 0.0);
  }
  SUBCASE("kappa out of range") {
    CHECK_THROWS_AS(kappa_family(pair, sq, std::vector<double>{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(kappa_family(pair, sq, std::vector<double>{pair.kappa_max}), std::invalid_argument);
    CHECK_THROWS_AS(kappa_family(pair, sq, std::vector<double>{-0.1}), std::invalid_argument);
  }
  SUBCASE("companion must be invariant") {
    CHECK_THROWS_AS(kappa_family(pair, PolygonNorm::regular(6), std::vector<double>{0.3}), std::invalid_argument);
  }
  SUBCASE("varying kappa gives non-proportional norms") {
    const std::vector<double> ks{0.2, 0.5};
    const auto fam = kappa_family(pair, sq, ks);
    CHECK(norm_distance(fam[0].polygon, fam[1].polygon, Vec2::UnitX()) >= 0.01);
  }
  SUBCASE("chain inequality term by term") {
    const std::vector<double> ks{0.1, 0.3, 0.6};
    const double rho = pair.frame.rho;
    const double inscription = 1.0 / std::cos(std::numbers::pi / 720) - 1.0;
    for (const auto& kn : kappa_family(pair, sq, ks)) {
      const double bound = pair.xi * rho * (1 + pair.k_const * kn.kappa);
      CHECK(bound < rho);
      for (double phi : angle_grid(720)) {
        const Vec2 u = unit_vector(phi);
        const Vec2 v = u / kn.polygon.gauge(u);
        const double lhs = kn.polygon.gauge(Vec2(b1 * v));
        const double mid = bound * c_norm_value(pair.frame, v);
        CHECK(lhs <= mid * (1 + 2 * inscription) + 1e-12);
        CHECK(mid <= rho * kn.polygon.gauge(v) * (1 + 1e-12));
        CHECK(lhs <= rho * (1.0 - kn.margin) + 1e-9);
      }
    }
  }
}

TEST_CASE("similar_scaled_rotation") {
  const Matrix s = mat2(1, 0.3, 0, 0.5);
  const auto angle = AngleSpec::rational_pi(1, 3);
  const Matrix b = similar_scaled_rotation(2.0, angle, s);
  CHECK(spectral_radius(b) == doctest::Approx(2.0).epsilon(1e-14));
  const auto f = eigen_frame(b);
  CHECK(f.angle == doctest::Approx(std::numbers::pi / 3).epsilon(1e-14));
  CHECK_NOTHROW((void)MatrixSet({b}).with_rotation_angle(0, angle));
}

TEST_CASE("certified_norm_family") {
  SUBCASE("example1 with a rational angle") {
    const MatrixSet ex = example1(AngleSpec::rational_pi(1, 3));
    const auto fam = certified_norm_family(ex, 1.0);
    REQUIRE(fam.has_value());
    CHECK(fam->norms.size() >= 3);
    for (std::size_t i = 0; i < fam->norms.size(); ++i) {
      CHECK(residual(ex, 1.0, fam->norms[i]).max_residual <= 1e-9);
      for (std::size_t j = i + 1; j < fam->norms.size(); ++j) CHECK(fam->distances(i, j) >= 0.01);
    }
  }
  SUBCASE("non-normal rational pair") {
    const auto angle = AngleSpec::rational_pi(1, 3);
    const Matrix b2 = similar_scaled_rotation(1.0, angle, mat2(1, 0.3, 0, 0.5));
    const MatrixSet set = MatrixSet({mat2(0.5, 0, 0, 0), b2}).with_rotation_angle(1, angle);
    const auto fam = certified_norm_family(set, 1.0);
    REQUIRE(fam.has_value());
    CHECK(fam->norms.size() >= 2);
    for (const auto& p : fam->norms) CHECK(residual(set, 1.0, p).max_residual <= 1e-9);
  }
  SUBCASE("negative tagged angle") {
    const MatrixSet ex = example1(AngleSpec::rational_pi(-1, 3));
    const auto fam = certified_norm_family(ex, 1.0);
    REQUIRE(fam.has_value());
    CHECK(fam->norms.size() >= 3);
  }
  SUBCASE("no exact rotation") {
    const MatrixSet ex = example1(AngleSpec::from_radians(std::sqrt(2.0) * std::numbers::pi, true));
    CHECK_FALSE(certified_norm_family(ex, 1.0).has_value());
    CHECK_FALSE(certified_norm_family(MatrixSet({mat2(1, 2, 3, 4)}), 1.0).has_value());
  }
}
