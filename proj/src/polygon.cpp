#include "barabanov/polygon.hpp"

#include "barabanov/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace barabanov {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kConvexTol = 1e-12;
constexpr char kCsvHeader[] = "# polygon-norm v1";

}  // namespace

PolygonNorm::PolygonNorm(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 4 || n % 2 != 0)
    throw DegenerateInputError("polygon norm needs an even number (>= 4) of vertices");
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw DegenerateInputError("polygon vertex is not finite");
    radius_ = std::max(radius_, v.norm());
  }
  if (!(radius_ > 0.0)) throw DegenerateInputError("polygon has zero circumradius");
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < half; ++i)
    if ((vertices_[i] + vertices_[i + half]).norm() > kSymTol * radius_)
      throw DegenerateInputError("polygon vertex list is not origin-symmetric");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2 e2 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (cross(e1, e2) < -kConvexTol * radius_ * radius_)
      throw DegenerateInputError("polygon vertices are not in convex counterclockwise position");
  }
  for (std::size_t i = 0; i < half; ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[i + 1];
    const Vec2 normal(q.y() - p.y(), p.x() - q.x());
    if (normal.norm() == 0.0) continue;
    const double h = normal.dot(p);
    if (!(h > 1e-14 * radius_ * normal.norm()))
      throw DegenerateInputError("origin is not interior to the polygon");
    facets_.push_back(normal / h);
  }
  if (facets_.size() < 2) throw DegenerateInputError("polygon has fewer than two distinct edges");
}

PolygonNorm PolygonNorm::symmetric_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts;
  pts.reserve(2 * points.size());
  for (const auto& p : points) {
    if (!p.allFinite()) throw DegenerateInputError("hull input point is not finite");
    pts.push_back(p);
    pts.push_back(-p);
  }
  auto less = [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  };
  std::sort(pts.begin(), pts.end(), less);
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a == b; }),
            pts.end());
  if (pts.size() < 4) throw DegenerateInputError("too few distinct points for a polygon norm");

  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.norm());
  const double eps = 1e-14 * scale * scale;
  auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) { return cross(a - o, b - o); };

  // Andrew's monotone chain; collinear points are dropped.
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= eps) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 4 || hull.size() % 2 != 0)
    throw DegenerateInputError("symmetric hull is degenerate (collinear input?)");

  // Rebuild from the first half so the pairing is exact.
  const std::size_t half = hull.size() / 2;
  std::vector<Vec2> verts(hull.begin(), hull.begin() + static_cast<std::ptrdiff_t>(half));
  for (std::size_t i = 0; i < half; ++i) verts.push_back(-verts[i]);
  return PolygonNorm(std::move(verts));
}

PolygonNorm PolygonNorm::regular(std::size_t n, double phase, double radius) {
  if (n < 4 || n % 2 != 0) throw DegenerateInputError("regular polygon needs an even n >= 4");
  std::vector<Vec2> verts;
  verts.reserve(n);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    verts.push_back(radius * unit_vector(a));
  }
  for (std::size_t i = 0; i < half; ++i) verts.push_back(-verts[i]);
  return PolygonNorm(std::move(verts));
}

PolygonNorm PolygonNorm::square() {
  return PolygonNorm({{1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}});
}

double PolygonNorm::gauge(const Vec2& v) const {
  double g = 0.0;
  for (const auto& f : facets_) g = std::max(g, std::abs(f.dot(v)));
  return g;
}

double PolygonNorm::operator_norm(const Matrix& a) const {
  double out = 0.0;
  for (std::size_t i = 0; i < vertices_.size() / 2; ++i) {
    const Vec2 img = a * vertices_[i];
    out = std::max(out, gauge(img));
  }
  return out;
}

PolygonNorm PolygonNorm::transformed(const Matrix& t) const {
  std::vector<Vec2> pts;
  pts.reserve(vertices_.size() / 2);
  for (std::size_t i = 0; i < vertices_.size() / 2; ++i) pts.push_back(t * vertices_[i]);
  return symmetric_hull(pts);
}

PolygonNorm PolygonNorm::scaled(double c) const {
  if (!(c > 0.0)) throw DegenerateInputError("polygon scale must be positive");
  std::vector<Vec2> verts = vertices_;
  for (auto& v : verts) v *= c;
  return PolygonNorm(std::move(verts));
}

PolygonNorm PolygonNorm::clipped_to_slab(const Vec2& normal, double width) const {
  // Sutherland-Hodgman against the two half-planes <normal, v> <= width and
  // <-normal, v> <= width.
  std::vector<Vec2> poly = vertices_;
  for (const Vec2& nrm : {normal, Vec2(-normal)}) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = poly[i];
      const Vec2& q = poly[(i + 1) % n];
      const double sp = nrm.dot(p) - width;
      const double sq = nrm.dot(q) - width;
      if (sp <= 0.0) out.push_back(p);
      if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + t * (q - p));
      }
    }
    poly = std::move(out);
  }
  return symmetric_hull(poly);
}

std::string PolygonNorm::to_csv() const {
  std::string out = kCsvHeader;
  out += '\n';
  char buf[64];
  for (const auto& v : vertices_) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.x() + 0.0, v.y() + 0.0);
    out += buf;
  }
  return out;
}

PolygonNorm PolygonNorm::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw DegenerateInputError("polygon CSV must start with '# polygon-norm v1'");
  std::vector<Vec2> verts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DegenerateInputError("polygon CSV line " + std::to_string(lineno) + ": expected x,y");
    try {
      verts.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw DegenerateInputError("polygon CSV line " + std::to_string(lineno) + ": bad number");
    }
  }
  return PolygonNorm(std::move(verts));
}

}  // namespace barabanov
