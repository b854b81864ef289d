#include "barabanov/constructions.hpp"

#include "barabanov/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace barabanov {

namespace {

const Vec2 kE1 = Vec2::UnitX();

Matrix rotation_by_fraction(std::int64_t j, std::int64_t k) {
  return make_rotation(AngleSpec::rational_pi(2 * j, k));
}

Matrix distance_matrix(const std::vector<PolygonNorm>& norms) {
  const auto n = static_cast<Eigen::Index>(norms.size());
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = norm_distance(norms[static_cast<std::size_t>(i)],
                                        norms[static_cast<std::size_t>(j)], kE1);
  return d;
}

struct Candidate {
  std::string label;
  PolygonNorm polygon;
  double kappa = 0.0;
};

// Greedy non-proportional selection in candidate order.
NormFamily select_family(const MatrixSet& set, double rho_hat, std::vector<Candidate> candidates,
                         double residual_tol, double min_distance, std::size_t grid,
                         std::vector<std::string>* rejected) {
  NormFamily fam;
  for (auto& c : candidates) {
    const auto rep = residual(set, rho_hat, c.polygon, grid);
    if (!(rep.max_residual <= residual_tol)) {
      if (rejected) {
        std::ostringstream os;
        os << c.label << " (residual " << rep.max_residual << ")";
        rejected->push_back(os.str());
      }
      continue;
    }
    bool distinct = true;
    for (const auto& kept : fam.norms)
      if (norm_distance(kept, c.polygon, kE1) < min_distance) {
        distinct = false;
        break;
      }
    if (!distinct) {
      if (rejected) rejected->push_back(c.label + " (proportional to an earlier norm)");
      continue;
    }
    fam.norms.push_back(std::move(c.polygon));
    fam.labels.push_back(c.label);
    fam.residuals.push_back(rep.max_residual);
    fam.kappas.push_back(c.kappa);
  }
  fam.distances = distance_matrix(fam.norms);
  return fam;
}

bool is_orthogonal_projection(const Matrix& x, Vec2& axis) {
  const double tol = 1e-9;
  if ((x - x.transpose()).norm() > tol) return false;
  if ((x * x - x).norm() > tol) return false;
  if (std::abs(x.trace() - 1.0) > tol) return false;
  const Vec2 c0 = x.col(0);
  const Vec2 c1 = x.col(1);
  axis = (c0.norm() >= c1.norm() ? c0 : c1).normalized();
  return true;
}

}  // namespace

// ------------------------------------------------------------ generators

MatrixSet example1(const AngleSpec& angle) {
  if (angle.is_multiple_of_pi())
    throw std::invalid_argument("example1 requires theta not an integer (angle " +
                                angle.to_string() + " is a multiple of pi)");
  Matrix a1 = Matrix::Zero(2, 2);
  a1(0, 0) = 1.0;
  MatrixSet set({a1, make_rotation(angle)}, {"A1", "A2"});
  return set.with_rotation_angle(1, angle);
}

MatrixSet example2_truncation(std::size_t max_n) {
  if (max_n == 0) throw std::invalid_argument("example2_truncation requires max_n >= 1");
  if (max_n > 60) throw std::invalid_argument("example2_truncation: max_n too large");
  std::vector<Matrix> mats{Matrix::Identity(2, 2)};
  std::vector<std::string> labels{"I"};
  std::vector<AngleSpec> angles{AngleSpec::rational_pi(0, 1)};
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto angle = AngleSpec::rational_pi(1, std::int64_t{1} << n);
    mats.push_back(make_rotation(angle));
    labels.push_back("R(pi/" + std::to_string(std::int64_t{1} << n) + ")");
    angles.push_back(angle);
  }
  MatrixSet set(std::move(mats), std::move(labels));
  for (std::size_t i = 0; i < angles.size(); ++i) set = set.with_rotation_angle(i, angles[i]);
  return set;
}

MatrixSet projection_family(std::span<const AngleSpec> angles) {
  if (angles.empty()) throw std::invalid_argument("projection_family needs at least one angle");
  std::vector<Matrix> mats;
  for (const auto& a : angles) {
    const Matrix r = make_rotation(a);
    const Vector u = r.col(0);
    mats.push_back(u * u.transpose());
  }
  return MatrixSet(std::move(mats));
}

// ------------------------------------------------------- invariant bodies

PolygonNorm group_closure(const PolygonNorm& seed, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("rotation order must be >= 1");
  const auto& verts = seed.vertices();
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(k) * verts.size() / 2);
  for (std::int64_t j = 0; j < k; ++j) {
    const Matrix r = rotation_by_fraction(j, k);
    for (std::size_t i = 0; i < verts.size() / 2; ++i) pts.push_back(r * verts[i]);
  }
  return PolygonNorm::symmetric_hull(pts);
}

PolygonNorm with_supporting_slabs(const PolygonNorm& body, const Vec2& axis, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("rotation order must be >= 1");
  const Vec2 u = axis.normalized();
  const double width = 1.0 / body.gauge(u);
  // Rotation by pi maps each slab to itself.
  const std::int64_t distinct = (k % 2 == 0) ? k / 2 : k;
  PolygonNorm out = body;
  for (std::int64_t j = 0; j < distinct; ++j) {
    const Vec2 n = rotation_by_fraction(j, k) * u;
    out = out.clipped_to_slab(n, width);
  }
  return out;
}

std::vector<std::pair<std::string, PolygonNorm>> standard_seeds(std::int64_t k) {
  std::size_t disc_n = 720;
  if (k >= 1 && k <= 8192) {
    const auto kk = static_cast<std::size_t>(k);
    disc_n = kk * ((720 + kk - 1) / kk);
    if (disc_n % 2 != 0) disc_n *= 2;
  }
  std::vector<Vec2> ellipse;
  for (double phi : angle_grid(720)) ellipse.emplace_back(2.0 * std::cos(phi), std::sin(phi));
  return {{"disc", PolygonNorm::euclidean(disc_n)},
          {"square", PolygonNorm::square()},
          {"hexagon", PolygonNorm::regular(6)},
          {"ellipse", PolygonNorm::symmetric_hull(ellipse)}};
}

NormFamily invariant_norm_family(std::int64_t k, std::size_t count,
                                 std::span<const PolygonNorm> seeds,
                                 bool require_vertical_tangent, const MatrixSet* certify_against,
                                 double rho_hat) {
  if (k < 1) throw std::invalid_argument("rotation order must be >= 1");
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("at least one seed polygon is required");
  const MatrixSet default_set({rotation_by_fraction(1, k)});
  const MatrixSet& target = certify_against ? *certify_against : default_set;

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    PolygonNorm body = group_closure(seeds[i], k);
    if (require_vertical_tangent) body = with_supporting_slabs(body, kE1, k);
    candidates.push_back({"seed" + std::to_string(i), std::move(body)});
  }
  std::vector<std::string> rejected;
  NormFamily fam = select_family(target, rho_hat, std::move(candidates), 1e-9, 0.01, 720, &rejected);
  if (fam.norms.size() < count) {
    std::ostringstream os;
    os << "invariant_norm_family: " << fam.norms.size() << " certified non-proportional bodies, "
       << count << " requested";
    for (const auto& r : rejected) os << "; rejected " << r;
    throw CertificationError(os.str());
  }
  return fam;
}

// ------------------------------------------------------------ eigenframe

EigenFrame eigen_frame(const Matrix& b) {
  if (b.rows() != 2 || b.cols() != 2) throw std::invalid_argument("eigen_frame requires 2x2");
  const double a = b(0, 0), bb = b(0, 1), c = b(1, 0), d = b(1, 1);
  const double tr = a + d;
  const double det = a * d - bb * c;
  const double disc = tr * tr - 4.0 * det;
  if (!(disc < -1e-12 * std::max(1.0, b.squaredNorm())))
    throw NotInPerturbationSetError("matrix has real or near-real spectrum");

  EigenFrame f;
  f.eigenvalue = {0.5 * tr, 0.5 * std::sqrt(-disc)};
  const std::complex<double> e = f.eigenvalue;
  const Eigen::Vector2cd v1(bb, e - a);
  const Eigen::Vector2cd v2(e - d, c);
  Eigen::Vector2cd v = v1.norm() > v2.norm() ? v1 : v2;
  const double m0 = std::abs(v(0));
  const double m1 = std::abs(v(1));
  const int big = (m0 > m1 * (1.0 + 1e-12)) ? 0 : 1;
  v *= std::conj(v(big)) / std::abs(v(big));
  v /= std::abs(v(1 - big));
  f.eigenvector = v;
  f.s = Matrix(2, 2);
  f.s << v(0).imag(), v(0).real(), v(1).imag(), v(1).real();
  f.rho = std::abs(e);
  f.angle = std::arg(e);
  return f;
}

double c_norm_value(const EigenFrame& frame, const Vec2& v) {
  return Vec2(frame.s.partialPivLu().solve(Vector(v))).norm();
}

PolygonNorm c_norm(const EigenFrame& frame, std::size_t vertices) {
  return PolygonNorm::regular(vertices).transformed(frame.s);
}

Matrix similar_scaled_rotation(double rho, const AngleSpec& angle, const Matrix& s) {
  return rho * s * make_rotation(angle) * s.inverse();
}

// ------------------------------------------------- perturbation construction

PerturbationPair perturbation_pair(const Matrix& b1, const Matrix& b2, const PolygonNorm& companion,
                                   std::optional<AngleSpec> b2_angle) {
  if (b1.rows() != 2 || b1.cols() != 2 || b2.rows() != 2 || b2.cols() != 2)
    throw std::invalid_argument("perturbation_pair requires 2x2 matrices");
  PerturbationPair p;
  p.b1 = b1;
  p.b2 = b2;
  p.b2_angle = b2_angle;
  p.frame = eigen_frame(b2);
  const Matrix& s = p.frame.s;
  const Matrix s_inv = s.inverse();
  p.b1_c_norm = spectral_norm(s_inv * b1 * s);
  const double rho = p.frame.rho;
  if (!(p.b1_c_norm > 1e-15 * rho))
    throw NotInPerturbationSetError("not in V: |B1|_C must be > 0");
  if (!(p.b1_c_norm < rho))
    throw NotInPerturbationSetError("not in V: |B1|_C must be < rho(B2)");
  p.xi = p.b1_c_norm / rho;

  // companion(v) = 1 on its boundary, so
  //   max |v|_C / companion(v) = max over vertices of |S^{-1} p|,
  //   max companion(v) / |v|_C = 1 / min over edges of |S^{-1} x|.
  const auto& verts = companion.vertices();
  double c_max = 0.0;
  double c_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vec2 a = s_inv * verts[i];
    const Vec2 bq = s_inv * verts[(i + 1) % verts.size()];
    c_max = std::max(c_max, a.norm());
    const Vec2 dir = bq - a;
    double t = dir.squaredNorm() > 0.0 ? -a.dot(dir) / dir.squaredNorm() : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    c_min = std::min(c_min, (a + t * dir).norm());
  }
  p.k_const = std::max(c_max, 1.0 / c_min);
  if (!(p.k_const > 1.0)) p.k_const = std::nextafter(1.0, 2.0);
  p.kappa_max = (1.0 / p.xi - 1.0) / p.k_const;
  return p;
}

std::vector<KappaNorm> kappa_family(const PerturbationPair& pair, const PolygonNorm& companion,
                                    std::span<const double> kappas, std::size_t grid) {
  const double rho = pair.frame.rho;
  const MatrixSet both({pair.b1, pair.b2}, {"B1", "B2"});
  const MatrixSet only_b2({pair.b2}, {"B2"});
  if (residual(only_b2, rho, companion, grid).max_residual > 1e-9)
    throw std::invalid_argument("companion norm is not invariant under B2 / rho(B2)");
  for (double kappa : kappas)
    if (!(kappa > 0.0 && kappa < pair.kappa_max))
      throw std::invalid_argument("kappa must lie in (0, kappa_max)");

  std::size_t c_vertices = 720;
  if (pair.b2_angle && pair.b2_angle->is_rational()) {
    const auto order = static_cast<std::size_t>(std::max<std::int64_t>(pair.b2_angle->rotation_order(), 1));
    if (order <= 8192) {
      c_vertices = order * ((720 + order - 1) / order);
      if (c_vertices % 2 != 0) c_vertices *= 2;
    }
  }
  const PolygonNorm c_poly = c_norm(pair.frame, c_vertices);

  std::vector<Vec2> dirs;
  for (const auto& v : c_poly.vertices()) dirs.push_back(v);
  for (const auto& v : companion.vertices()) dirs.push_back(v);

  std::vector<KappaNorm> out;
  for (double kappa : kappas) {
    std::vector<Vec2> pts;
    pts.reserve(dirs.size());
    for (const auto& d : dirs) pts.push_back(d / (c_poly.gauge(d) + kappa * companion.gauge(d)));
    PolygonNorm poly = PolygonNorm::symmetric_hull(pts);

    const auto rep = residual(both, rho, poly, grid);
    double margin = std::numeric_limits<double>::infinity();
    for (double phi : angle_grid(grid)) {
      const Vec2 u = unit_vector(phi);
      const Vec2 v = u / poly.gauge(u);
      margin = std::min(margin, (poly.gauge(Vec2(pair.b2 * v)) - poly.gauge(Vec2(pair.b1 * v))) / rho);
    }
    if (!(rep.max_residual <= 1e-9) || !(margin > 0.0)) {
      std::ostringstream os;
      os << "kappa_family: kappa " << kappa << " failed certification (residual "
         << rep.max_residual << ", margin " << margin << ")";
      throw CertificationError(os.str());
    }
    out.push_back({kappa, std::move(poly), rep.max_residual, margin});
  }
  return out;
}

// -------------------------------------------------- certified family pipeline

std::optional<NormFamily> certified_norm_family(const MatrixSet& set, double rho_hat,
                                                const FamilyConfig& config) {
  if (set.dim() != 2) return std::nullopt;

  // Pivot: tagged rational rotation with rho(G) = rho_hat and the largest order.
  std::optional<std::size_t> pivot;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& tag = set.rotation_angle(i);
    if (!tag || !tag->is_rational()) continue;
    if (std::abs(spectral_radius(set[i]) - rho_hat) > 1e-9 * rho_hat) continue;
    if (!pivot || tag->rotation_order() > set.rotation_angle(*pivot)->rotation_order()) pivot = i;
  }
  if (!pivot) return std::nullopt;

  const Matrix& g = set[*pivot];
  const AngleSpec& g_angle = *set.rotation_angle(*pivot);
  const double g_rho = spectral_radius(g);
  Matrix s = Matrix::Identity(2, 2);
  if (!g_angle.is_multiple_of_pi() && (g / g_rho - make_rotation(g_angle)).norm() > 1e-12)
    s = eigen_frame(g).s;
  const Matrix s_inv = s.inverse();

  // Group order: every tagged generator that acts as an exact rotation in
  // this frame joins the group.
  std::int64_t k = 2;
  std::vector<bool> in_group(set.size(), false);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& tag = set.rotation_angle(i);
    if (!tag || !tag->is_rational()) continue;
    const double r = spectral_radius(set[i]);
    if (!(r > 0.0)) continue;
    const Matrix x = s_inv * set[i] * s / r;
    // The eigenframe may present the rotation with the opposite orientation.
    if ((x - make_rotation(*tag)).norm() > 1e-9 && (x - make_rotation(tag->negated())).norm() > 1e-9)
      continue;
    in_group[i] = true;
    k = std::lcm(k, tag->rotation_order());
    if (k > 8192) return std::nullopt;
  }

  std::vector<Vec2> axes;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (in_group[i]) continue;
    Vec2 axis;
    if (is_orthogonal_projection(s_inv * set[i] * s / rho_hat, axis)) axes.push_back(axis);
  }

  std::vector<Candidate> candidates;
  const bool identity_frame = (s - Matrix::Identity(2, 2)).norm() == 0.0;
  auto to_original = [&](const PolygonNorm& p) { return identity_frame ? p : p.transformed(s); };
  for (const auto& [name, seed] : standard_seeds(k)) {
    const PolygonNorm body = group_closure(seed, k);
    candidates.push_back({name, to_original(body)});
    if (!axes.empty()) {
      PolygonNorm clipped = body;
      for (const auto& axis : axes) clipped = with_supporting_slabs(clipped, axis, k);
      candidates.push_back({name + "+slab", to_original(clipped)});
    }
  }

  // Perturbation route for pairs.
  if (set.size() == 2) {
    const std::size_t other = 1 - *pivot;
    for (const char* comp_name : {"square", "hexagon"}) {
      try {
        const PolygonNorm seed =
            std::string(comp_name) == "square" ? PolygonNorm::square() : PolygonNorm::regular(6);
        const PolygonNorm companion = to_original(group_closure(seed, k));
        const auto pair = perturbation_pair(set[other], g, companion, g_angle);
        if (std::abs(pair.frame.rho - rho_hat) > 1e-9 * rho_hat) continue;
        const std::vector<double> ks{0.25 * pair.kappa_max, 0.5 * pair.kappa_max,
                                     0.75 * pair.kappa_max};
        for (auto& kn : kappa_family(pair, companion, ks, config.grid)) {
          std::ostringstream label;
          label << "C+kappa*" << comp_name << " (kappa=" << kn.kappa << ")";
          candidates.push_back({label.str(), std::move(kn.polygon), kn.kappa});
        }
      } catch (const Error&) {
        // Outside the perturbation regime; the invariant bodies still apply.
      } catch (const std::invalid_argument&) {
      }
    }
  }

  return select_family(set, rho_hat, std::move(candidates), config.residual_tol,
                       config.min_distance, config.grid, nullptr);
}

}  // namespace barabanov
