#pragma once

#include "barabanov/matset.hpp"
#include "barabanov/polygon.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace barabanov {

/// The norm a finite-horizon gauge is built on: Euclidean, sup, or a 2D
/// polygon norm, optionally composed with a linear map (seed(v) = base(T v)).
class SeedNorm {
 public:
  enum class Kind { Euclidean, Sup, Polygon };

  static SeedNorm euclidean() { return SeedNorm(Kind::Euclidean); }
  static SeedNorm sup() { return SeedNorm(Kind::Sup); }
  static SeedNorm polygon(PolygonNorm p);

  /// v -> base(t v).
  [[nodiscard]] SeedNorm composed_with(const Matrix& t) const;

  [[nodiscard]] double operator()(const Vector& v) const;

  /// sup_v seed(A v) / seed(v).
  [[nodiscard]] double operator_norm(const Matrix& a) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::string name() const;

 private:
  explicit SeedNorm(Kind k) : kind_(k) {}
  [[nodiscard]] double base(const Vector& v) const;
  [[nodiscard]] double base_operator_norm(const Matrix& a) const;

  Kind kind_;
  std::optional<PolygonNorm> polygon_;
  std::optional<Matrix> transform_;
  std::optional<Matrix> transform_inv_;
};

struct GaugeEvaluation {
  double value = 0.0;
  std::size_t peak_frontier = 0;
  /// Set when the frontier cap forced dropping non-dominated vectors; the
  /// value is then a lower approximation of G_n(v).
  bool truncated = false;
};

/// Finite-horizon Barabanov gauge
///   G_n(v) = max_{0 <= k <= n} max_{P in A^k} rho_hat^{-k} seed(P v).
///
/// Evaluation walks the vector orbit tree level by level. A branch is cut
/// when seed(u) * max_{1<=j<=remaining} q^j <= current max, where
/// q = max_a |A_a|_seed / rho_hat bounds the growth of any descendant, so
/// cuts never change the value. Vectors with seed norm <= 1e-14 of the level
/// max are dropped. Frontiers above 4096 vectors are first merged (vectors
/// within 1e-12 of the level max), then truncated to the 4096 largest.
///
/// Immutable after construction; safe to evaluate concurrently.
class GaugeApprox {
 public:
  static constexpr std::size_t kFrontierCap = 4096;
  static constexpr double kDominatedRatio = 1e-14;
  static constexpr double kMergeRatio = 1e-12;

  GaugeApprox(MatrixSet set, double rho_hat, std::size_t horizon, SeedNorm seed);

  [[nodiscard]] double operator()(const Vector& v) const { return evaluate(v).value; }
  [[nodiscard]] GaugeEvaluation evaluate(const Vector& v) const;

  [[nodiscard]] GaugeApprox with_horizon(std::size_t horizon) const;

  [[nodiscard]] const MatrixSet& set() const { return set_; }
  [[nodiscard]] double rho_hat() const { return rho_hat_; }
  [[nodiscard]] std::size_t horizon() const { return horizon_; }
  [[nodiscard]] const SeedNorm& seed() const { return seed_; }

 private:
  MatrixSet set_;
  double rho_hat_;
  std::size_t horizon_;
  SeedNorm seed_;
  double growth_;  // q
};

/// G_n(v). Throws std::invalid_argument on non-finite input.
double gauge_eval(const GaugeApprox& g, const Vector& v);

/// |G_{n+1}(v) - max(seed(v), rho_hat^{-1} max_a G_n(A_a v))|.
double gauge_recursion_check(const GaugeApprox& g, const Vector& v);

/// A norm on R^2 as a callable.
using Norm2 = std::function<double(const Vec2&)>;

Norm2 as_norm(const PolygonNorm& p);
Norm2 as_norm(const GaugeApprox& g);

struct ResidualReport {
  enum class OneSided {
    Balanced,       ///< |excess| within 1e-12 on both sides, or both signs occur
    SubBarabanov,   ///< max_a N(Av)/rho_hat never exceeds N(v)
    SuperBarabanov  ///< max_a N(Av)/rho_hat never falls below N(v)
  };
  double max_residual = 0.0;
  Vec2 worst_direction = Vec2::UnitX();
  std::size_t grid_size = 0;
  OneSided onesided = OneSided::Balanced;
  double rho_hat = 0.0;
  double max_excess = 0.0;   ///< max of (max_a N(Av)/rho_hat - N(v)), clipped at 0
  double max_deficit = 0.0;  ///< max of (N(v) - max_a N(Av)/rho_hat), clipped at 0
};

std::string to_string(ResidualReport::OneSided s);

/// Bellman residual of a norm on an angular grid. Each grid direction is
/// normalized to N(v) = 1; the report holds max |max_a N(A v)/rho_hat - 1|.
/// Requires d = 2 and grid_size >= 16.
ResidualReport residual(const MatrixSet& set, double rho_hat, const Norm2& norm,
                        std::size_t grid_size = 720);
ResidualReport residual(const MatrixSet& set, double rho_hat, const PolygonNorm& norm,
                        std::size_t grid_size = 720);
ResidualReport residual(const MatrixSet& set, double rho_hat, const GaugeApprox& norm,
                        std::size_t grid_size = 720);

/// Inscribed polygon through u_i / G(u_i) at grid_size uniform angles,
/// convex-hulled. For a smooth ball the hull drops nothing and the gauge
/// error between grid directions is O(1/grid_size^2) relative.
/// grid_size must be even and >= 8. Throws DegenerateInputError if the gauge
/// vanishes on a grid direction.
PolygonNorm polygon_from_gauge(const GaugeApprox& g, std::size_t grid_size = 720);

/// max over 720 grid directions of |log(a(v)/b(v))| after rescaling both
/// norms to 1 at v0. Zero iff the norms are proportional on the grid.
double norm_distance(const Norm2& a, const Norm2& b, const Vec2& v0, std::size_t grid_size = 720);
double norm_distance(const PolygonNorm& a, const PolygonNorm& b, const Vec2& v0,
                     std::size_t grid_size = 720);

struct ExtremalTrajectory {
  std::vector<std::size_t> indices;
  /// rho_hat^{-k} N(v_k) for k = 1..steps.
  std::vector<double> growth;
  /// Smallest N(v_k) / N(v_0)-scaled value along the trajectory (k = 0..steps).
  double n_min = 0.0;
};

/// Greedy extremal index sequence: at each step pick the generator
/// maximizing N(A v_k); values within 1e-12 relative of the best count as
/// ties and the lowest index wins. If the norm's relative residual is eps
/// then growth[k-1] >= N(v) (1 - eps)^k on grid-resolved directions.
ExtremalTrajectory extremal_sequence(const MatrixSet& set, const PolygonNorm& norm, double rho_hat,
                                     const Vec2& v, std::size_t steps);

}  // namespace barabanov
