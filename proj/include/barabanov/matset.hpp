#pragma once

#include "barabanov/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace barabanov {

/// A rotation angle, either an exact rational multiple of pi or a float.
///
/// Rationality is never inferred from a float. A float angle may carry a
/// caller-supplied "irrational over pi" declaration; downstream verdicts use
/// only that flag or the exact rational form.
class AngleSpec {
 public:
  /// p*pi/q, stored in lowest terms with q >= 1.
  struct RationalPi {
    std::int64_t p = 0;
    std::int64_t q = 1;
    bool operator==(const RationalPi&) const = default;
  };
  struct FloatAngle {
    double radians = 0.0;
    bool declared_irrational = false;
    bool operator==(const FloatAngle&) const = default;
  };

  static AngleSpec rational_pi(std::int64_t p, std::int64_t q);
  static AngleSpec from_radians(double radians, bool declared_irrational = false);

  [[nodiscard]] bool is_rational() const { return std::holds_alternative<RationalPi>(kind_); }
  [[nodiscard]] const RationalPi& rational() const { return std::get<RationalPi>(kind_); }
  [[nodiscard]] const FloatAngle& floating() const { return std::get<FloatAngle>(kind_); }
  [[nodiscard]] bool declared_irrational() const;
  [[nodiscard]] double radians() const;

  /// Order of the cyclic group generated by the rotation through this angle:
  /// 2q / gcd(p, 2q). Only defined for rational angles.
  [[nodiscard]] std::int64_t rotation_order() const;

  /// True when the angle is an integer multiple of pi (exactly, or within
  /// 1e-12 relative for float angles).
  [[nodiscard]] bool is_multiple_of_pi() const;

  [[nodiscard]] AngleSpec plus_pi() const;
  [[nodiscard]] AngleSpec negated() const;

  /// "p/q*pi" or "<radians> rad[, irrational]".
  [[nodiscard]] std::string to_string() const;

  bool operator==(const AngleSpec&) const = default;

 private:
  explicit AngleSpec(std::variant<RationalPi, FloatAngle> k) : kind_(k) {}
  std::variant<RationalPi, FloatAngle> kind_;
};

/// [[cos a, -sin a], [sin a, cos a]]. Rational angles that are multiples of
/// pi/4 use exact table values (0, +-1, +-sqrt(1/2)).
Matrix make_rotation(const AngleSpec& angle);

/// A finite, ordered set of real d x d matrices.
///
/// Optionally tagged per generator with a rotation angle: the tag asserts
/// that rho(A)^{-1} A is similar to the rotation through that angle, which is
/// how exact rational-rotation structure reaches the uniqueness pipeline.
class MatrixSet {
 public:
  explicit MatrixSet(std::vector<Matrix> mats, std::vector<std::string> labels = {});

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return mats_.size(); }
  [[nodiscard]] const Matrix& operator[](std::size_t i) const { return mats_[i]; }
  [[nodiscard]] const std::vector<Matrix>& matrices() const { return mats_; }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] const std::optional<AngleSpec>& rotation_angle(std::size_t i) const {
    return angles_[i];
  }

  /// Copy with generator i tagged. Throws std::invalid_argument if the
  /// matrix's trace and determinant do not match rho * rotation(angle)
  /// within 1e-9 relative, or if d != 2.
  [[nodiscard]] MatrixSet with_rotation_angle(std::size_t i, const AngleSpec& angle) const;

  /// c * A for every generator; tags follow (angle + pi for c < 0).
  [[nodiscard]] MatrixSet scaled(double c) const;

  /// T^{-1} A T for every generator; tags are similarity invariant.
  [[nodiscard]] MatrixSet conjugated(const Matrix& t) const;

  [[nodiscard]] double max_spectral_norm() const;

 private:
  std::size_t dim_ = 0;
  std::vector<Matrix> mats_;
  std::vector<std::string> labels_;
  std::vector<std::optional<AngleSpec>> angles_;
};

/// A_{i_n} ... A_{i_1}: indices[0] is applied first, indices.back() last.
struct ProductWord {
  std::vector<std::size_t> indices;
  Matrix value;
  [[nodiscard]] std::size_t length() const { return indices.size(); }
};

/// Left-multiplication accumulation of set[indices] in order; the empty word
/// gives the identity. Throws std::out_of_range on a bad index.
ProductWord product_of(const MatrixSet& set, std::span<const std::size_t> indices);

struct IrreducibilityVerdict {
  enum class Status { Irreducible, Reducible, Inconclusive };
  Status status = Status::Inconclusive;
  /// d x k orthonormal basis of a common invariant subspace when Reducible.
  Matrix witness;
  std::string method;
};

std::string to_string(IrreducibilityVerdict::Status s);

/// Decides whether the generators share a nontrivial invariant subspace.
///
/// d = 2 is exact up to the 1e-9 eigenvector tolerance: reducible iff a
/// common real eigenvector exists. For d > 2 the associative algebra spanned
/// by words up to length d^2 is computed; full span means irreducible,
/// otherwise eigenvectors of a seeded random algebra element generate
/// candidate invariant subspaces. When that element has simple spectrum the
/// search is exhaustive, otherwise an unresolved search is Inconclusive.
IrreducibilityVerdict irreducibility(const MatrixSet& set);

/// Max over generators and witness columns of dist(A w, span W) / (|A| |w|).
double invariance_defect(const MatrixSet& set, const Matrix& basis);

/// True iff every matrix with Frobenius norm > tol has second singular value
/// <= tol.
bool rank_one_diagnostic(std::span<const Matrix> mats, double tol);

}  // namespace barabanov
