#include "barabanov/baranorm.hpp"

#include "barabanov/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace barabanov {

// ----------------------------------------------------------------- SeedNorm

SeedNorm SeedNorm::polygon(PolygonNorm p) {
  SeedNorm s(Kind::Polygon);
  s.polygon_ = std::move(p);
  return s;
}

SeedNorm SeedNorm::composed_with(const Matrix& t) const {
  SeedNorm s = *this;
  const Matrix prev = transform_ ? *transform_ : Matrix::Identity(t.rows(), t.cols());
  s.transform_ = prev * t;
  s.transform_inv_ = s.transform_->inverse();
  return s;
}

double SeedNorm::base(const Vector& v) const {
  switch (kind_) {
    case Kind::Euclidean:
      return v.norm();
    case Kind::Sup:
      return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    case Kind::Polygon:
      if (v.size() != 2) throw std::invalid_argument("polygon seed norm requires d = 2");
      return polygon_->gauge(v);
  }
  return 0.0;
}

double SeedNorm::operator()(const Vector& v) const {
  return transform_ ? base(*transform_ * v) : base(v);
}

double SeedNorm::base_operator_norm(const Matrix& a) const {
  switch (kind_) {
    case Kind::Euclidean:
      return spectral_norm(a);
    case Kind::Sup:
      return sup_operator_norm(a);
    case Kind::Polygon:
      return polygon_->operator_norm(a);
  }
  return 0.0;
}

double SeedNorm::operator_norm(const Matrix& a) const {
  if (transform_) return base_operator_norm((*transform_) * a * (*transform_inv_));
  return base_operator_norm(a);
}

std::string SeedNorm::name() const {
  std::string out;
  switch (kind_) {
    case Kind::Euclidean:
      out = "euclidean";
      break;
    case Kind::Sup:
      out = "sup";
      break;
    case Kind::Polygon:
      out = "polygon";
      break;
  }
  if (transform_) out += "(transformed)";
  return out;
}

// -------------------------------------------------------------- GaugeApprox

GaugeApprox::GaugeApprox(MatrixSet set, double rho_hat, std::size_t horizon, SeedNorm seed)
    : set_(std::move(set)), rho_hat_(rho_hat), horizon_(horizon), seed_(std::move(seed)) {
  if (!(rho_hat_ > 0.0) || !std::isfinite(rho_hat_))
    throw std::invalid_argument("rho_hat must be positive and finite");
  growth_ = 0.0;
  for (const auto& a : set_.matrices()) growth_ = std::max(growth_, seed_.operator_norm(a));
  growth_ /= rho_hat_;
}

GaugeApprox GaugeApprox::with_horizon(std::size_t horizon) const {
  GaugeApprox g = *this;
  g.horizon_ = horizon;
  return g;
}

namespace {

struct OrbitItem {
  Vector w;
  double s;
};

}  // namespace

GaugeEvaluation GaugeApprox::evaluate(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != set_.dim())
    throw std::invalid_argument("vector dimension does not match the matrix set");
  if (!v.allFinite()) throw std::invalid_argument("gauge input must be finite");

  GaugeEvaluation out;
  double best = seed_(v);
  std::vector<OrbitItem> frontier{{v, best}};
  out.peak_frontier = 1;
  for (std::size_t k = 1; k <= horizon_ && !frontier.empty(); ++k) {
    std::vector<OrbitItem> next;
    next.reserve(frontier.size() * set_.size());
    double level_max = 0.0;
    for (const auto& item : frontier) {
      for (const auto& a : set_.matrices()) {
        Vector w = a * item.w / rho_hat_;
        const double s = seed_(w);
        level_max = std::max(level_max, s);
        next.push_back({std::move(w), s});
      }
    }
    best = std::max(best, level_max);
    if (k == horizon_) break;

    const std::size_t remaining = horizon_ - k;
    const double reach =
        growth_ >= 1.0 ? std::pow(growth_, static_cast<double>(remaining)) : growth_;
    std::erase_if(next, [&](const OrbitItem& it) {
      return !(it.s * reach > best) || it.s <= kDominatedRatio * level_max;
    });

    if (next.size() > kFrontierCap) {
      std::vector<Matrix> ws;
      ws.reserve(next.size());
      for (const auto& it : next) ws.emplace_back(it.w);
      const auto kept = dedupe_by_frobenius(ws, kMergeRatio * level_max);
      std::vector<OrbitItem> merged;
      merged.reserve(kept.size());
      for (std::size_t i : kept) merged.push_back(std::move(next[i]));
      next = std::move(merged);
    }
    if (next.size() > kFrontierCap) {
      std::stable_sort(next.begin(), next.end(),
                       [](const OrbitItem& a, const OrbitItem& b) { return a.s > b.s; });
      next.resize(kFrontierCap);
      out.truncated = true;
    }
    out.peak_frontier = std::max(out.peak_frontier, next.size());
    frontier = std::move(next);
  }
  out.value = best;
  return out;
}

double gauge_eval(const GaugeApprox& g, const Vector& v) { return g.evaluate(v).value; }

double gauge_recursion_check(const GaugeApprox& g, const Vector& v) {
  const double lhs = g.with_horizon(g.horizon() + 1)(v);
  double rhs = g.seed()(v);
  for (const auto& a : g.set().matrices()) rhs = std::max(rhs, g(a * v) / g.rho_hat());
  return std::abs(lhs - rhs);
}

Norm2 as_norm(const PolygonNorm& p) {
  return [p](const Vec2& v) { return p.gauge(v); };
}

Norm2 as_norm(const GaugeApprox& g) {
  return [g](const Vec2& v) { return g(Vector(v)); };
}

// ----------------------------------------------------------------- residual

std::string to_string(ResidualReport::OneSided s) {
  switch (s) {
    case ResidualReport::OneSided::Balanced:
      return "balanced";
    case ResidualReport::OneSided::SubBarabanov:
      return "subBarabanov";
    case ResidualReport::OneSided::SuperBarabanov:
      return "superBarabanov";
  }
  return "balanced";
}

ResidualReport residual(const MatrixSet& set, double rho_hat, const Norm2& norm,
                        std::size_t grid_size) {
  if (set.dim() != 2) throw std::invalid_argument("residual is evaluated on a 2D angular grid");
  if (grid_size < 16) throw std::invalid_argument("grid_size must be >= 16");
  if (!(rho_hat > 0.0)) throw std::invalid_argument("rho_hat must be positive");

  ResidualReport rep;
  rep.grid_size = grid_size;
  rep.rho_hat = rho_hat;
  for (double phi : angle_grid(grid_size)) {
    const Vec2 u = unit_vector(phi);
    const double nu = norm(u);
    if (!(nu > 0.0)) throw DegenerateInputError("norm vanishes on a grid direction");
    const Vec2 v = u / nu;
    double image = 0.0;
    for (const auto& a : set.matrices()) image = std::max(image, norm(Vec2(a * v)));
    const double r = image / rho_hat - 1.0;
    rep.max_excess = std::max(rep.max_excess, r);
    rep.max_deficit = std::max(rep.max_deficit, -r);
    if (std::abs(r) > rep.max_residual) {
      rep.max_residual = std::abs(r);
      rep.worst_direction = u;
    }
  }
  constexpr double kSide = 1e-12;
  if (rep.max_excess <= kSide && rep.max_deficit > kSide)
    rep.onesided = ResidualReport::OneSided::SubBarabanov;
  else if (rep.max_deficit <= kSide && rep.max_excess > kSide)
    rep.onesided = ResidualReport::OneSided::SuperBarabanov;
  return rep;
}

ResidualReport residual(const MatrixSet& set, double rho_hat, const PolygonNorm& norm,
                        std::size_t grid_size) {
  return residual(set, rho_hat, as_norm(norm), grid_size);
}

ResidualReport residual(const MatrixSet& set, double rho_hat, const GaugeApprox& norm,
                        std::size_t grid_size) {
  return residual(set, rho_hat, as_norm(norm), grid_size);
}

PolygonNorm polygon_from_gauge(const GaugeApprox& g, std::size_t grid_size) {
  if (g.set().dim() != 2) throw std::invalid_argument("polygon_from_gauge requires d = 2");
  if (grid_size < 8 || grid_size % 2 != 0)
    throw std::invalid_argument("grid_size must be even and >= 8");
  std::vector<Vec2> pts;
  pts.reserve(grid_size);
  for (double phi : angle_grid(grid_size)) {
    const Vec2 u = unit_vector(phi);
    const double gu = g(Vector(u));
    if (!(gu > 0.0))
      throw DegenerateInputError("gauge vanishes on a grid direction (reducible or degenerate set)");
    pts.push_back(u / gu);
  }
  return PolygonNorm::symmetric_hull(pts);
}

double norm_distance(const Norm2& a, const Norm2& b, const Vec2& v0, std::size_t grid_size) {
  if (v0.norm() == 0.0) throw std::invalid_argument("normalization vector must be nonzero");
  const double a0 = a(v0);
  const double b0 = b(v0);
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw DegenerateInputError("norm vanishes at v0");
  double out = 0.0;
  for (double phi : angle_grid(grid_size)) {
    const Vec2 u = unit_vector(phi);
    out = std::max(out, std::abs(std::log((a(u) / a0) / (b(u) / b0))));
  }
  return out;
}

double norm_distance(const PolygonNorm& a, const PolygonNorm& b, const Vec2& v0,
                     std::size_t grid_size) {
  return norm_distance(as_norm(a), as_norm(b), v0, grid_size);
}

// ----------------------------------------------------------------- extremal

ExtremalTrajectory extremal_sequence(const MatrixSet& set, const PolygonNorm& norm, double rho_hat,
                                     const Vec2& v, std::size_t steps) {
  if (set.dim() != 2) throw std::invalid_argument("extremal_sequence requires d = 2");
  if (v.norm() == 0.0) throw std::invalid_argument("extremal_sequence needs a nonzero vector");
  if (!(rho_hat > 0.0)) throw std::invalid_argument("rho_hat must be positive");

  ExtremalTrajectory out;
  Vec2 cur = v;
  out.n_min = norm.gauge(cur);
  std::vector<double> vals(set.size());
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t a = 0; a < set.size(); ++a) vals[a] = norm.gauge(Vec2(set[a] * cur));
    const double top = *std::max_element(vals.begin(), vals.end());
    std::size_t pick = 0;
    while (vals[pick] < top * (1.0 - 1e-12)) ++pick;
    out.indices.push_back(pick);
    cur = set[pick] * cur / rho_hat;
    const double n = norm.gauge(cur);
    out.growth.push_back(n);
    out.n_min = std::min(out.n_min, n);
  }
  return out;
}

}  // namespace barabanov
