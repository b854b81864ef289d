#include "barabanov/constructions.hpp"
#include "barabanov/error.hpp"
#include "barabanov/semigroup.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace barabanov;
using testing::mat2;
using testing::vec2;

namespace {

MatrixSet example1_irrational() {
  return example1(AngleSpec::from_radians(std::sqrt(2.0) * std::numbers::pi, true));
}

SemigroupSample sample_of(std::vector<Matrix> mats) {
  SemigroupSample s;
  s.rho_hat = 1.0;
  for (auto& m : mats) {
    SemigroupElement e;
    e.scaled_norm = spectral_norm(m);
    e.value = std::move(m);
    e.length = 1;
    s.elements.push_back(std::move(e));
  }
  return s;
}

// Distinct scaled products (Frobenius distance >= tol) over all words with
// length in [lo, hi] and scaled spectral norm >= keep.
std::size_t brute_distinct(const MatrixSet& set, double rho, std::size_t lo, std::size_t hi, double keep,
                           double tol) {
  std::vector<oracle::M2> mats;
  for (const auto& m : set.matrices()) mats.push_back(oracle::from(m) * (1.0L / rho));
  std::vector<oracle::M2> found;
  for (std::size_t n = lo; n <= hi; ++n)
    oracle::for_each_word(mats.size(), n, [&](const std::vector<std::size_t>& w) {
      const auto p = oracle::product(mats, w);
      if (oracle::spectral_norm(p) < keep) return;
      for (const auto& q : found) {
        const oracle::real d = sqrtl((p.a - q.a) * (p.a - q.a) + (p.b - q.b) * (p.b - q.b) +
                                     (p.c - q.c) * (p.c - q.c) + (p.d - q.d) * (p.d - q.d));
        if (d < tol) return;
      }
      found.push_back(p);
    });
  return found.size();
}

}  // namespace

TEST_CASE("RunLengthWord") {
  const std::vector<std::size_t> idx{1, 0, 0, 0, 1, 1};
  const auto w = RunLengthWord::from_indices(idx);
  CHECK(w.runs.size() == 3);
  CHECK(w.length() == 6);
  CHECK(w.to_string() == "1 0^3 1^2");
  CHECK(RunLengthWord::from_indices({}).to_string().empty());
  const MatrixSet s({mat2(1, 1, 0, 1), mat2(0, -1, 1, 0)});
  CHECK((scaled_word_product(s, 2.0, w) - product_of(s, idx).value / 64.0).norm() <= 1e-15);
  CHECK_THROWS_AS(scaled_word_product(s, 1.0, RunLengthWord{{{5, 1}}}), std::out_of_range);
}

TEST_CASE("sample_limit_semigroup examples") {
  SUBCASE("eighth turn cycles with period 8") {
    const MatrixSet s({make_rotation(AngleSpec::rational_pi(1, 4))});
    const auto sample = sample_limit_semigroup(s, 1.0, {1, 16, 0, 0.5, 1e-8});
    REQUIRE(sample.size() == 8);
    std::vector<bool> seen(8, false);
    for (const auto& e : sample.elements) {
      double a = std::atan2(e.value(1, 0), e.value(0, 0));
      if (a < 0) a += 2 * std::numbers::pi;
      const double k = a / (std::numbers::pi / 4);
      CHECK(std::abs(k - std::round(k)) <= 1e-12);
      seen[static_cast<std::size_t>(std::lround(k)) % 8] = true;
      // The longest representative is kept.
      CHECK(e.length > 8);
    }
    for (bool b : seen) CHECK(b);
  }
  SUBCASE("decaying set gives an empty sample") {
    const MatrixSet s({mat2(0.5, 0, 0, 1.0 / 3.0)});
    CHECK(sample_limit_semigroup(s, 1.0, {4, 20, 0, 0.1, 1e-8}).empty());
  }
  SUBCASE("example1 with theta = 1/2") {
    const MatrixSet s = example1(AngleSpec::rational_pi(1, 2));
    const auto sample = sample_limit_semigroup(s, 1.0, {2, 12, 0, 0.5, 1e-8});
    CHECK(sample.size() == 12);
    CHECK(brute_distinct(s, 1.0, 2, 12, 0.5, 1e-8) == 12);
    std::size_t rotations = 0;
    for (const auto& e : sample.elements)
      if ((e.value.transpose() * e.value - Matrix::Identity(2, 2)).norm() <= 1e-12) ++rotations;
    CHECK(rotations == 4);
  }
  SUBCASE("argument errors") {
    const MatrixSet s({Matrix::Identity(2, 2)});
    CHECK_THROWS_AS(sample_limit_semigroup(s, 1.0, {0, 3, 0, 0.5, 1e-8}), std::invalid_argument);
    CHECK_THROWS_AS(sample_limit_semigroup(s, 1.0, {4, 3, 0, 0.5, 1e-8}), std::invalid_argument);
    CHECK_THROWS_AS(sample_limit_semigroup(s, 0.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(sample_limit_semigroup(s, 1.0, {1, 3, 70000, 0.5, 1e-8}), std::invalid_argument);
  }
}

TEST_CASE("sample elements are reproducible and separated") {
  const std::vector<MatrixSet> sets{example1(AngleSpec::rational_pi(1, 3)), example1_irrational(),
                                    example2_truncation(3),
                                    MatrixSet({mat2(0.9, 0.3, -0.2, 0.8), mat2(0.1, -1.0, 1.0, 0.2)})};
  for (const auto& set : sets) {
    const double rho = jsr_bounds(set, 6).lower;
    const auto sample = sample_limit_semigroup(set, rho, {1, 8, 512, 0.5, 1e-8});
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const auto& e = sample.elements[i];
      CHECK(e.length == e.word.length());
      const Matrix again = scaled_word_product(set, rho, e.word);
      CHECK((again - e.value).norm() <= 1e-12);
      if (e.length <= 8) {
        std::vector<std::size_t> idx;
        for (const auto& [g, c] : e.word.runs) idx.insert(idx.end(), c, g);
        const Matrix direct = product_of(set, idx).value / std::pow(rho, static_cast<double>(e.length));
        CHECK((direct - e.value).norm() <= 1e-12);
      }
      for (std::size_t j = i + 1; j < sample.size(); ++j)
        CHECK((e.value - sample.elements[j].value).norm() >= sample.dedupe_tol);
      if (i > 0) {
        const auto& p = sample.elements[i - 1];
        CHECK((p.length < e.length || (p.length == e.length && p.word < e.word)));
      }
    }
  }
}

TEST_CASE("transitivity_check examples") {
  SUBCASE("64 rotations") {
    std::vector<Matrix> rots;
    for (int k = 0; k < 64; ++k) rots.push_back(make_rotation(AngleSpec::rational_pi(2 * k, 64)));
    const auto sample = sample_of(rots);
    const auto rep = transitivity_check(sample, 200, 0.05, 9);
    CHECK(rep.satisfied);
    CHECK(rep.pairs_tested == 200);
    CHECK(rep.worst_error <= 2 * std::sin(std::numbers::pi / 64));
    for (const auto& w : rep.witnesses) CHECK(std::abs(std::abs(w.lambda) - 1.0) <= 1 - std::cos(std::numbers::pi / 64));
  }
  SUBCASE("identity cannot rotate") {
    const auto sample = sample_of({Matrix::Identity(2, 2)});
    const std::vector<std::pair<Vector, Vector>> pairs{{vec2(1, 0), vec2(0, 1)}};
    const auto rep = transitivity_check(sample, pairs, 1e-3);
    CHECK_FALSE(rep.satisfied);
    REQUIRE(rep.failures.size() == 1);
    CHECK(std::isinf(rep.failures[0].best_error));
  }
  SUBCASE("irrational rotation orbit") {
    const auto sample = sample_limit_semigroup(example1_irrational(), 1.0, {1, 10, 4096, 0.5, 1e-8});
    const auto rep = transitivity_check(sample, 200, 1e-3, 1);
    CHECK(rep.satisfied);
    CHECK(rep.worst_error <= 1e-3);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(transitivity_check(SemigroupSample{}, 10, 1e-3, 1), std::invalid_argument);
    CHECK_THROWS_AS(transitivity_check(sample_of({Matrix::Identity(2, 2)}), 0, 1e-3, 1), std::invalid_argument);
  }
}

TEST_CASE("transitivity witnesses satisfy their inequalities") {
  const auto sample = sample_limit_semigroup(example1(AngleSpec::rational_pi(1, 5)), 1.0, {1, 10, 0, 0.5, 1e-8});
  const auto rep = transitivity_check(sample, 100, 0.5, 3);
  for (const auto& w : rep.witnesses) {
    const Matrix& b1 = sample.elements[w.b1].value;
    const Matrix& b2 = sample.elements[w.b2].value;
    CHECK((b1 * w.v1 - w.lambda * w.v2).norm() <= w.err_forward * (1 + 1e-15));
    CHECK((b2 * w.v2 - w.v1 / w.lambda).norm() <= w.err_backward * (1 + 1e-15));
    CHECK(std::abs(w.lambda) >= 1e-6);
    CHECK(std::abs(w.lambda) <= 1e6);
    if (rep.satisfied) {
      CHECK(w.err_forward <= rep.tol);
      CHECK(w.err_backward <= rep.tol);
    }
  }
  // Same seed, same report.
  const auto again = transitivity_check(sample, 100, 0.5, 3);
  CHECK(again.worst_error == rep.worst_error);
  CHECK(again.witnesses.size() == rep.witnesses.size());
}

TEST_CASE("detect_rotation_subgroup") {
  SUBCASE("finite") {
    const auto sample = sample_limit_semigroup(MatrixSet({make_rotation(AngleSpec::rational_pi(1, 4))}), 1.0,
                                               {1, 16, 0, 0.5, 1e-8});
    const auto r = detect_rotation_subgroup(sample);
    CHECK(r.kind == RotationSubgroup::Kind::Finite);
    CHECK(r.order == 8);
  }
  SUBCASE("dense") {
    const MatrixSet s({make_rotation(AngleSpec::from_radians(std::sqrt(2.0) * std::numbers::pi, true))});
    const auto sample = sample_limit_semigroup(s, 1.0, {1, 10, 4096, 0.5, 1e-8});
    const auto r = detect_rotation_subgroup(sample);
    CHECK(r.kind == RotationSubgroup::Kind::DenseInSO2);
    CHECK(r.distinct_angles >= 64);
    CHECK(r.max_gap < 2 * std::numbers::pi / 64);
    // Density implies approximate transitivity on unit vectors.
    CHECK(transitivity_check(sample, 200, 1e-2, 5).satisfied);
  }
  SUBCASE("none") {
    const auto sample = sample_limit_semigroup(MatrixSet({mat2(1, 0, 0, 0)}), 1.0, {1, 5, 0, 0.5, 1e-8});
    CHECK(detect_rotation_subgroup(sample).kind == RotationSubgroup::Kind::None);
  }
  SUBCASE("dimension") {
    const auto sample = sample_of({Matrix::Identity(3, 3)});
    CHECK_THROWS_AS(detect_rotation_subgroup(sample), std::invalid_argument);
  }
}

TEST_CASE("rank_one_diagnostic on samples") {
  const auto ex = sample_limit_semigroup(example1_irrational(), 1.0, {1, 8, 0, 0.5, 1e-8});
  CHECK_FALSE(rank_one_diagnostic(ex, 1e-9));
  CHECK(rank_one_diagnostic(sample_of({mat2(1, 0, 0, 0)}), 1e-9));

  const std::vector<AngleSpec> phis{AngleSpec::rational_pi(0, 1), AngleSpec::rational_pi(1, 5),
                                    AngleSpec::rational_pi(3, 7)};
  const MatrixSet proj = projection_family(phis);
  const auto ps = sample_limit_semigroup(proj, 1.0, {1, 6, 0, 0.0, 1e-8});
  REQUIRE_FALSE(ps.empty());
  CHECK(rank_one_diagnostic(ps, 1e-9));
  for (const auto& e : ps.elements) {
    // Second singular value from the oracle: |det| / largest.
    const auto o = oracle::from(e.value);
    const oracle::real s1 = oracle::spectral_norm(o);
    if (s1 > 1e-9L) CHECK(static_cast<double>(fabsl(o.a * o.d - o.b * o.c) / s1) <= 1e-9);
  }
}

TEST_CASE("uniqueness_verdict examples") {
  SUBCASE("irrational angle is unique") {
    const auto v = uniqueness_verdict(example1_irrational());
    CHECK(v.kind == UniquenessVerdict::Kind::UniqueCertifiedNumerically);
    REQUIRE(v.transitivity.has_value());
    CHECK(v.transitivity->satisfied);
    CHECK(v.rotations.kind == RotationSubgroup::Kind::DenseInSO2);
    CHECK_FALSE(v.rank_one);
  }
  SUBCASE("rational angle is not unique") {
    const auto v = uniqueness_verdict(example1(AngleSpec::rational_pi(1, 3)));
    CHECK(v.kind == UniquenessVerdict::Kind::NotUnique);
    REQUIRE(v.family.has_value());
    CHECK(v.family->norms.size() >= 2);
    for (double r : v.family->residuals) CHECK(r <= 1e-9);
  }
  SUBCASE("reducible input") {
    CHECK_THROWS_AS(uniqueness_verdict(MatrixSet({mat2(2, 0, 0, 1), mat2(1, 0, 0, 3)})), ReducibleInputError);
  }
  SUBCASE("undeclared float angle stays undetermined") {
    const auto v = uniqueness_verdict(example1(AngleSpec::from_radians(std::sqrt(2.0) * std::numbers::pi)));
    CHECK(v.kind == UniquenessVerdict::Kind::Undetermined);
    REQUIRE(v.transitivity.has_value());
    CHECK(v.transitivity->satisfied);
  }
  SUBCASE("example2_truncation is not unique") {
    const auto v = uniqueness_verdict(example2_truncation(3));
    CHECK(v.kind == UniquenessVerdict::Kind::NotUnique);
    CHECK(v.rotations.kind == RotationSubgroup::Kind::Finite);
    CHECK(v.rotations.order == 16);
  }
  SUBCASE("perturbation pairs") {
    const Matrix s = mat2(1, 0.3, 0, 0.5);
    const auto rational = AngleSpec::rational_pi(1, 3);
    const MatrixSet r = MatrixSet({mat2(0.5, 0, 0, 0), similar_scaled_rotation(1.0, rational, s)})
                            .with_rotation_angle(1, rational);
    CHECK(uniqueness_verdict(r).kind == UniquenessVerdict::Kind::NotUnique);

    const auto irr = AngleSpec::from_radians(std::sqrt(2.0) * std::numbers::pi / 3, true);
    const MatrixSet i = MatrixSet({mat2(0.5, 0, 0, 0), similar_scaled_rotation(1.0, irr, s)})
                            .with_rotation_angle(1, irr);
    UniquenessConfig cfg;
    cfg.sample.power_length = 8192;
    CHECK(uniqueness_verdict(i, cfg).kind == UniquenessVerdict::Kind::UniqueCertifiedNumerically);
  }
  SUBCASE("wide JSR bracket is refused") {
    std::mt19937_64 rng(61);
    const MatrixSet s({testing::random_matrix(rng, 2), testing::random_matrix(rng, 2)});
    UniquenessConfig cfg;
    cfg.jsr_depth = 2;
    CHECK_THROWS_AS(uniqueness_verdict(s, cfg), Error);
  }
}

TEST_CASE("uniqueness_verdict is stable under scaling") {
  const std::vector<MatrixSet> sets{example1(AngleSpec::rational_pi(1, 3)), example1(AngleSpec::rational_pi(1, 2)),
                                    example2_truncation(2), example1_irrational()};
  for (const auto& s : sets) {
    const auto base = uniqueness_verdict(s).kind;
    for (double c : {0.5, 2.0}) CHECK(uniqueness_verdict(s.scaled(c)).kind == base);
  }
}
