#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace barabanov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Largest singular value. Closed form for 2x2, JacobiSVD otherwise.
double spectral_norm(const Matrix& m);

/// Largest eigenvalue modulus. Closed form for 2x2,
/// EigenSolver otherwise.
double spectral_radius(const Matrix& m);

/// Second-largest singular value (0 for 1x1).
double second_singular_value(const Matrix& m);

/// Max absolute row sum (operator norm induced by the sup norm).
double sup_operator_norm(const Matrix& m);

bool all_finite(const Matrix& m);

/// Unit vector (cos a, sin a).
inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Uniform angular grid 2*pi*i/n, i = 0..n-1.
std::vector<double> angle_grid(std::size_t n);

/// Indices of near-duplicates (Frobenius distance < tol) removed greedily in
/// the given order: returns the positions kept.
std::vector<std::size_t> dedupe_by_frobenius(std::span<const Matrix> mats, double tol);

}  // namespace barabanov
