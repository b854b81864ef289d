#pragma once

#include "barabanov/constructions.hpp"
#include "barabanov/jsr.hpp"
#include "barabanov/matset.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace barabanov {

/// A word in run-length form: (generator index, repeat count) runs, applied
/// first run first. Power orbits reach lengths far beyond what an explicit
/// index list could hold.
struct RunLengthWord {
  std::vector<std::pair<std::size_t, std::size_t>> runs;

  static RunLengthWord from_indices(std::span<const std::size_t> indices);
  [[nodiscard]] std::size_t length() const;
  /// "0^4096" / "1 0^2 1".
  [[nodiscard]] std::string to_string() const;
  bool operator==(const RunLengthWord&) const = default;
  auto operator<=>(const RunLengthWord&) const = default;
};

/// rho_hat^{-len} times the product of the word, accumulated left-multiply
/// one factor at a time (the same arithmetic the sampler uses).
Matrix scaled_word_product(const MatrixSet& set, double rho_hat, const RunLengthWord& word);

struct SemigroupElement {
  Matrix value;
  RunLengthWord word;
  std::size_t length = 0;
  double scaled_norm = 0.0;  ///< spectral norm of value
};

/// A finite, deduplicated sample of scaled products approximating the limit
/// semigroup. Elements are ordered by length, then word.
struct SemigroupSample {
  std::vector<SemigroupElement> elements;
  double rho_hat = 0.0;
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  std::size_t power_length = 0;
  double dedupe_tol = 0.0;

  [[nodiscard]] std::size_t size() const { return elements.size(); }
  [[nodiscard]] bool empty() const { return elements.empty(); }
};

struct SampleOptions {
  std::size_t min_length = 1;
  std::size_t max_length = 12;
  /// Powers of each single generator are followed up to this length
  /// (0 means max_length). At most 65536.
  std::size_t power_length = 0;
  double keep_threshold = 0.5;
  double dedupe_tol = 1e-8;
};

/// All words of length in [min_length, max_length] whose scaled product has
/// spectral norm >= keep_threshold, plus single-generator powers up to
/// power_length. Near duplicates (Frobenius distance < dedupe_tol) collapse
/// onto the longest representative. An empty sample means every product
/// decays below the threshold.
/// Throws std::invalid_argument if min_length > max_length, min_length == 0
/// or rho_hat <= 0.
SemigroupSample sample_limit_semigroup(const MatrixSet& set, double rho_hat,
                                       const SampleOptions& options = {});

struct TransitivityWitness {
  Vector v1;
  Vector v2;
  std::size_t b1 = 0;  ///< index into the sample
  std::size_t b2 = 0;
  double lambda = 0.0;
  double err_forward = 0.0;   ///< |B1 v1 - lambda v2|
  double err_backward = 0.0;  ///< |B2 v2 - v1 / lambda|
};

struct TransitivityFailure {
  Vector v1;
  Vector v2;
  /// Smallest max(err_forward, err_backward) found; +inf if no B1 gave an
  /// admissible lambda.
  double best_error = 0.0;
};

struct TransitivityReport {
  bool satisfied = false;
  std::size_t pairs_tested = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  /// Max over pairs of the best error found.
  double worst_error = 0.0;
  std::vector<TransitivityWitness> witnesses;
  std::vector<TransitivityFailure> failures;
};

/// For each pair (v1, v2) looks for B1, B2 in the sample and lambda with
///   |B1 v1 - lambda v2| <= tol  and  |B2 v2 - lambda^{-1} v1| <= tol.
/// lambda = <B1 v1, v2> / |v2|^2 (least squares) and must satisfy
/// 1e-6 <= |lambda| <= 1e6. The 256 best B1 by forward error are tried; the
/// pair (B1, B2) minimizing the larger error is kept.
TransitivityReport transitivity_check(const SemigroupSample& sample,
                                      std::span<const std::pair<Vector, Vector>> pairs,
                                      double tol);

/// Same with `pairs` unit-vector pairs drawn from Lcg64(seed): each vector is
/// d standard normals, normalized, v1 drawn before v2.
/// Throws std::invalid_argument on an empty sample or pairs == 0.
TransitivityReport transitivity_check(const SemigroupSample& sample, std::size_t pairs, double tol,
                                      std::uint64_t seed);

struct RotationSubgroup {
  enum class Kind { None, Finite, DenseInSO2 };
  Kind kind = Kind::None;
  std::int64_t order = 0;           ///< set for Finite
  std::size_t distinct_angles = 0;  ///< rotations found in the sample
  double max_gap = 0.0;             ///< largest circular gap between their angles
};

std::string to_string(RotationSubgroup::Kind k);

/// Rotations in the sample (|M^T M - I| <= tol, det > 0) and the structure
/// of their angle set: Finite(k) when the distinct angles are, within tol,
/// exactly the k-th roots of unity; DenseInSO2 with >= 64 distinct angles
/// and every circular gap below 2*pi/64; None otherwise.
/// Throws std::invalid_argument when d != 2.
RotationSubgroup detect_rotation_subgroup(const SemigroupSample& sample, double tol = 1e-9);

bool rank_one_diagnostic(const SemigroupSample& sample, double tol);

struct UniquenessConfig {
  std::size_t jsr_depth = 6;
  double prune_ratio = 0.999;
  /// Refuse to certify when upper - lower > jsr_rel_tol * upper.
  double jsr_rel_tol = 1e-6;
  SampleOptions sample{1, 10, 4096, 0.5, 1e-8};
  std::size_t pairs = 200;
  double tol = 1e-3;
  std::uint64_t seed = 1;
  FamilyConfig family;
};

struct UniquenessVerdict {
  enum class Kind { UniqueCertifiedNumerically, NotUnique, Undetermined };
  Kind kind = Kind::Undetermined;
  JsrBounds jsr;
  double rho_hat = 0.0;
  SemigroupSample sample;
  RotationSubgroup rotations;
  std::optional<TransitivityReport> transitivity;
  std::optional<NormFamily> family;
  bool rank_one = false;
  /// Human-readable reasons (why a route was or was not taken).
  std::vector<std::string> notes;
};

std::string to_string(UniquenessVerdict::Kind k);

/// The uniqueness pipeline:
///  1. JSR bracket (also on the eigenframe-conjugated set of each 2x2
///     generator with non-real spectrum; the tightest bracket is kept);
///     rho_hat is its lower end.
///  2. Limit semigroup sample.
///  3. A generator tagged with an exact rational angle and rho = rho_hat:
///     certified norm family; >= 2 norms gives NotUnique.
///  4. Otherwise the transitivity check; satisfied gives
///     UniqueCertifiedNumerically, unless some rho_hat generator carries a
///     float angle without the irrationality declaration (then Undetermined).
///  5. Otherwise Undetermined.
/// Throws ReducibleInputError unless the set is Irreducible, and Error when
/// the JSR bracket is wider than config.jsr_rel_tol.
UniquenessVerdict uniqueness_verdict(const MatrixSet& set, const UniquenessConfig& config = {});

}  // namespace barabanov
