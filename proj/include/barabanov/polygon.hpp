#pragma once

#include "barabanov/linalg.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace barabanov {

/// A norm on R^2 whose unit ball is an origin-symmetric convex polygon.
///
/// Vertices are stored counterclockwise with vertices[i + n/2] == -vertices[i]
/// exactly. gauge(v) = min{t > 0 : v/t in polygon}, evaluated as the max over
/// edges of <f_e, v> where f_e is the outward normal scaled so that
/// <f_e, p> = 1 on edge e.
class PolygonNorm {
 public:
  /// Validates the vertex list: even count >= 4, antipodal symmetry within
  /// 1e-12 (relative to the circumradius), convex counterclockwise order
  /// (consecutive edge cross products > -1e-12 R^2), origin strictly inside.
  /// Throws DegenerateInputError.
  explicit PolygonNorm(std::vector<Vec2> vertices);

  /// Convex hull of points united with their negations. Exactly symmetric
  /// because the monotone chain predicates are sign-symmetric.
  static PolygonNorm symmetric_hull(std::span<const Vec2> points);

  /// Regular n-gon (n even) with a vertex at angle `phase`, circumradius r.
  static PolygonNorm regular(std::size_t n, double phase = 0.0, double radius = 1.0);

  /// Inscribed regular n-gon of the unit disc, a vertex on the x-axis.
  static PolygonNorm euclidean(std::size_t n = 720) { return regular(n); }

  /// Unit ball of the sup norm.
  static PolygonNorm square();

  [[nodiscard]] double gauge(const Vec2& v) const;
  [[nodiscard]] double gauge(const Vector& v) const { return gauge(Vec2(v(0), v(1))); }
  double operator()(const Vec2& v) const { return gauge(v); }

  [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
  [[nodiscard]] std::size_t size() const { return vertices_.size(); }

  /// Operator norm sup gauge(Av)/gauge(v) = max over vertices of gauge(A p).
  [[nodiscard]] double operator_norm(const Matrix& a) const;

  /// Image of the unit ball under t (vertices t * p).
  [[nodiscard]] PolygonNorm transformed(const Matrix& t) const;

  /// Unit ball scaled by c > 0 (gauge divided by c).
  [[nodiscard]] PolygonNorm scaled(double c) const;

  /// Intersection with the slab |<normal, v>| <= width.
  [[nodiscard]] PolygonNorm clipped_to_slab(const Vec2& normal, double width) const;

  /// "# polygon-norm v1" header, then one "x,y" line per vertex (full
  /// symmetric list, counterclockwise), 17 significant digits.
  [[nodiscard]] std::string to_csv() const;
  static PolygonNorm from_csv(const std::string& text);

 private:
  std::vector<Vec2> vertices_;
  std::vector<Vec2> facets_;  // first half of the edges; the rest are negations
  double radius_ = 0.0;
};

}  // namespace barabanov
