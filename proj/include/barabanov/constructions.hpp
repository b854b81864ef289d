#pragma once

#include "barabanov/baranorm.hpp"
#include "barabanov/matset.hpp"
#include "barabanov/polygon.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace barabanov {

/// {diag(1, 0), R(angle)}; the rotation is tagged with `angle`.
/// Throws std::invalid_argument when angle is an integer multiple of pi.
MatrixSet example1(const AngleSpec& angle);

/// {I} together with R(pi / 2^n) for 1 <= n <= max_n, all tagged exactly.
MatrixSet example2_truncation(std::size_t max_n);

/// Rank-one orthogonal projections u(phi) u(phi)^T, u(phi) = (cos phi, sin phi).
MatrixSet projection_family(std::span<const AngleSpec> angles);

/// A family of polygon norms with their certification data.
struct NormFamily {
  std::vector<PolygonNorm> norms;
  std::vector<std::string> labels;
  std::vector<double> residuals;
  /// Pairwise norm_distance (normalized at e1), symmetric, zero diagonal.
  Matrix distances;
  /// Set for families built from the perturbation construction.
  std::vector<double> kappas;
};

/// Hull of the orbit of a symmetric body under rotations by 2*pi*j/k.
PolygonNorm group_closure(const PolygonNorm& seed, std::int64_t k);

/// Intersects the body with the slabs |<R^j axis, v>| <= 1/gauge(axis),
/// j < k. The result keeps the k-fold symmetry and has a supporting line
/// orthogonal to `axis` at the boundary point on the axis, so the orthogonal
/// projection onto the axis line does not increase the gauge.
PolygonNorm with_supporting_slabs(const PolygonNorm& body, const Vec2& axis, std::int64_t k);

/// Seeds used by the pipelines: disc (vertex count a multiple of k, >= 720),
/// square, hexagon, and a 2:1 ellipse.
std::vector<std::pair<std::string, PolygonNorm>> standard_seeds(std::int64_t k);

/// Norms whose unit balls are invariant under rotation by 2*pi/k: for each
/// seed K0 the body is the hull of the rotated copies of K0 and -K0. With
/// require_vertical_tangent the body gets a vertical supporting line where it
/// meets the horizontal axis (so diag(1, 0) is non-expanding).
///
/// Every body is certified against `certify_against` (default {R(2*pi/k)},
/// rho_hat 1): residual <= 1e-9 on a 720 grid. Bodies within norm_distance
/// 0.01 of an earlier one are skipped. Throws CertificationError when fewer
/// than `count` non-proportional certified bodies remain.
NormFamily invariant_norm_family(std::int64_t k, std::size_t count,
                                 std::span<const PolygonNorm> seeds,
                                 bool require_vertical_tangent,
                                 const MatrixSet* certify_against = nullptr, double rho_hat = 1.0);

/// Complex eigenstructure of a real 2x2 matrix with non-real spectrum.
struct EigenFrame {
  std::complex<double> eigenvalue;  ///< imaginary part > 0
  Eigen::Vector2cd eigenvector;     ///< see eigen_frame for the normalization
  Matrix s;                         ///< columns [Im V, Re V]
  double rho = 0.0;                 ///< |E|
  double angle = 0.0;               ///< arg E in (0, pi)
};

/// S^{-1} B S = rho R(angle). The eigenvector is rotated so its component of
/// largest modulus is real and positive (ties go to the later component) and
/// scaled so the other component has modulus 1. For any rotation matrix this
/// gives S = I exactly; for [[0, -4], [1, 0]] it gives S = [[0, 2], [-1, 0]].
/// Throws NotInPerturbationSetError when trace^2 - 4 det >= -1e-12 max(1, |B|_F^2).
EigenFrame eigen_frame(const Matrix& b);

/// |v|_C = |S^{-1} v|.
double c_norm_value(const EigenFrame& frame, const Vec2& v);

/// Polygon inscribed in the ellipse S(unit circle): vertices S (cos phi_i, sin phi_i).
PolygonNorm c_norm(const EigenFrame& frame, std::size_t vertices = 720);

struct PerturbationPair {
  Matrix b1;
  Matrix b2;
  EigenFrame frame;
  std::optional<AngleSpec> b2_angle;
  double b1_c_norm = 0.0;  ///< |B1|_C, operator norm induced by |.|_C
  double xi = 0.0;         ///< |B1|_C / rho(B2)
  double k_const = 0.0;    ///< K with K^{-1}|v|_C <= companion(v) <= K |v|_C
  double kappa_max = 0.0;  ///< (1/xi - 1) / K
};

/// Membership test and constants for the perturbation construction.
/// K is exact for a polygon companion: the ratio extremes lie at companion
/// vertices or at the |.|_C-closest points of its edges.
/// Throws NotInPerturbationSetError if B2 has real spectrum or
/// |B1|_C is not in (0, rho(B2)).
PerturbationPair perturbation_pair(const Matrix& b1, const Matrix& b2, const PolygonNorm& companion,
                                   std::optional<AngleSpec> b2_angle = std::nullopt);

struct KappaNorm {
  double kappa = 0.0;
  PolygonNorm polygon;
  double residual = 0.0;
  /// min over grid directions with N(v) = 1 of (N(B2 v) - N(B1 v)) / rho(B2).
  double margin = 0.0;
};

/// Polygons for v -> |v|_C + kappa * companion(v). The |.|_C part is the
/// inscribed polygon whose vertex count is a multiple of the rotation order
/// of B2 (when its angle is rational), so the sum is exactly invariant.
/// Each result is certified: residual on {B1, B2} <= 1e-9 and a strictly
/// positive B2-over-B1 margin. Throws std::invalid_argument for kappa outside
/// (0, kappa_max) or a companion not invariant under B2 / rho(B2), and
/// CertificationError when certification fails.
std::vector<KappaNorm> kappa_family(const PerturbationPair& pair, const PolygonNorm& companion,
                                    std::span<const double> kappas, std::size_t grid = 720);

/// B2 = rho * S R(angle) S^{-1}, tagged with the angle.
Matrix similar_scaled_rotation(double rho, const AngleSpec& angle, const Matrix& s);

struct FamilyConfig {
  std::size_t count = 3;
  double min_distance = 0.01;
  double residual_tol = 1e-9;
  std::size_t grid = 720;
};

/// Certified non-proportional Barabanov norms for a 2D set containing an
/// exactly tagged rational rotation generator G with rho(G) = rho_hat.
///
/// Candidates are group-invariant bodies in the eigenframe of G (optionally
/// clipped by supporting slabs for rank-one orthogonal projections), and for
/// pairs with xi < 1 the kappa family. Each candidate is certified by
/// residual, and a non-proportional subset is chosen greedily.
/// Returns nullopt when no generator meets the preconditions; the returned
/// family may be smaller than config.count.
std::optional<NormFamily> certified_norm_family(const MatrixSet& set, double rho_hat,
                                                const FamilyConfig& config = {});

}  // namespace barabanov
