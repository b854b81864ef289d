#include "barabanov/matset.hpp"

#include "barabanov/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace barabanov {

// ---------------------------------------------------------------- AngleSpec

AngleSpec AngleSpec::rational_pi(std::int64_t p, std::int64_t q) {
  if (q == 0) throw std::invalid_argument("rational angle with zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  if (p == 0) q = 1;
  return AngleSpec(RationalPi{p, q});
}

AngleSpec AngleSpec::from_radians(double radians, bool declared_irrational) {
  if (!std::isfinite(radians)) throw std::invalid_argument("angle must be finite");
  return AngleSpec(FloatAngle{radians, declared_irrational});
}

bool AngleSpec::declared_irrational() const {
  if (const auto* f = std::get_if<FloatAngle>(&kind_)) return f->declared_irrational;
  return false;
}

double AngleSpec::radians() const {
  if (const auto* r = std::get_if<RationalPi>(&kind_))
    return std::numbers::pi * static_cast<double>(r->p) / static_cast<double>(r->q);
  return std::get<FloatAngle>(kind_).radians;
}

std::int64_t AngleSpec::rotation_order() const {
  const auto& r = rational();
  const std::int64_t two_q = 2 * r.q;
  return two_q / std::gcd(r.p, two_q);
}

bool AngleSpec::is_multiple_of_pi() const {
  if (const auto* r = std::get_if<RationalPi>(&kind_)) return r->q == 1;
  const double t = std::get<FloatAngle>(kind_).radians / std::numbers::pi;
  return std::abs(t - std::round(t)) <= 1e-12 * std::max(1.0, std::abs(t));
}

AngleSpec AngleSpec::plus_pi() const {
  if (const auto* r = std::get_if<RationalPi>(&kind_)) return rational_pi(r->p + r->q, r->q);
  const auto& f = std::get<FloatAngle>(kind_);
  return from_radians(f.radians + std::numbers::pi, f.declared_irrational);
}

AngleSpec AngleSpec::negated() const {
  if (const auto* r = std::get_if<RationalPi>(&kind_)) return rational_pi(-r->p, r->q);
  const auto& f = std::get<FloatAngle>(kind_);
  return from_radians(-f.radians, f.declared_irrational);
}

std::string AngleSpec::to_string() const {
  std::ostringstream os;
  if (const auto* r = std::get_if<RationalPi>(&kind_)) {
    os << r->p << "/" << r->q << "*pi";
  } else {
    const auto& f = std::get<FloatAngle>(kind_);
    os.precision(17);
    os << f.radians << " rad";
    if (f.declared_irrational) os << ", irrational";
  }
  return os.str();
}

Matrix make_rotation(const AngleSpec& angle) {
  double c = 0.0;
  double s = 0.0;
  if (angle.is_rational()) {
    const auto [p, q] = angle.rational();
    const std::int64_t two_q = 2 * q;
    const std::int64_t r = ((p % two_q) + two_q) % two_q;  // angle = r*pi/q in [0, 2pi)
    if ((4 * r) % q == 0) {
      constexpr double h = std::numbers::sqrt2 / 2.0;
      static constexpr double kCos[8] = {1, h, 0, -h, -1, -h, 0, h};
      static constexpr double kSin[8] = {0, h, 1, h, 0, -h, -1, -h};
      const auto octant = static_cast<std::size_t>((4 * r) / q);
      c = kCos[octant];
      s = kSin[octant];
    } else {
      // Extended precision keeps the result within half an ulp of the true value.
      const long double a = std::numbers::pi_v<long double> * static_cast<long double>(r) /
                            static_cast<long double>(q);
      c = static_cast<double>(std::cos(a));
      s = static_cast<double>(std::sin(a));
    }
  } else {
    c = std::cos(angle.radians());
    s = std::sin(angle.radians());
  }
  Matrix m(2, 2);
  m << c, -s, s, c;
  return m;
}

// ---------------------------------------------------------------- MatrixSet

MatrixSet::MatrixSet(std::vector<Matrix> mats, std::vector<std::string> labels)
    : mats_(std::move(mats)), labels_(std::move(labels)) {
  if (mats_.empty()) throw std::invalid_argument("matrix set must be non-empty");
  dim_ = static_cast<std::size_t>(mats_.front().rows());
  if (dim_ == 0) throw std::invalid_argument("matrices must have positive dimension");
  for (const auto& m : mats_) {
    if (static_cast<std::size_t>(m.rows()) != dim_ || static_cast<std::size_t>(m.cols()) != dim_)
      throw std::invalid_argument("all matrices must be square of identical dimension");
    if (!all_finite(m)) throw std::invalid_argument("matrix entries must be finite");
  }
  if (!labels_.empty() && labels_.size() != mats_.size())
    throw std::invalid_argument("label count does not match matrix count");
  if (labels_.empty())
    for (std::size_t i = 0; i < mats_.size(); ++i) labels_.push_back("A" + std::to_string(i + 1));
  angles_.resize(mats_.size());
}

MatrixSet MatrixSet::with_rotation_angle(std::size_t i, const AngleSpec& angle) const {
  if (i >= size()) throw std::out_of_range("generator index out of range");
  if (dim_ != 2) throw std::invalid_argument("rotation tags require d = 2");
  const Matrix& a = mats_[i];
  const double det = a.determinant();
  if (!(det > 0.0)) throw std::invalid_argument("tagged generator must have positive determinant");
  const double rho = std::sqrt(det);
  const double tr = a.trace();
  const double expected_tr = 2.0 * rho * std::cos(angle.radians());
  if (std::abs(tr - expected_tr) > 1e-9 * rho)
    throw std::invalid_argument("trace does not match tagged rotation angle " + angle.to_string());
  if (angle.is_multiple_of_pi()) {
    // +-rho*I; a Jordan block has the same trace and determinant.
    const Matrix diff = a - 0.5 * tr * Matrix::Identity(2, 2);
    if (diff.norm() > 1e-9 * rho)
      throw std::invalid_argument("generator tagged with a multiple of pi must be scalar");
  }
  MatrixSet out = *this;
  out.angles_[i] = angle;
  return out;
}

MatrixSet MatrixSet::scaled(double c) const {
  MatrixSet out = *this;
  for (auto& m : out.mats_) m *= c;
  if (c < 0.0)
    for (auto& a : out.angles_)
      if (a) a = a->plus_pi();
  if (c == 0.0) std::fill(out.angles_.begin(), out.angles_.end(), std::nullopt);
  return out;
}

MatrixSet MatrixSet::conjugated(const Matrix& t) const {
  const Matrix t_inv = t.inverse();
  MatrixSet out = *this;
  for (auto& m : out.mats_) m = t_inv * m * t;
  return out;
}

double MatrixSet::max_spectral_norm() const {
  double out = 0.0;
  for (const auto& m : mats_) out = std::max(out, spectral_norm(m));
  return out;
}

ProductWord product_of(const MatrixSet& set, std::span<const std::size_t> indices) {
  ProductWord w;
  w.indices.assign(indices.begin(), indices.end());
  w.value = Matrix::Identity(set.dim(), set.dim());
  for (std::size_t idx : indices) {
    if (idx >= set.size()) throw std::out_of_range("product index out of range");
    w.value = set[idx] * w.value;
  }
  return w;
}

// ---------------------------------------------------------- irreducibility

std::string to_string(IrreducibilityVerdict::Status s) {
  switch (s) {
    case IrreducibilityVerdict::Status::Irreducible:
      return "Irreducible";
    case IrreducibilityVerdict::Status::Reducible:
      return "Reducible";
    case IrreducibilityVerdict::Status::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

double invariance_defect(const MatrixSet& set, const Matrix& basis) {
  // basis is assumed orthonormal
  double worst = 0.0;
  const Matrix proj = basis * basis.transpose();
  for (const auto& a : set.matrices()) {
    const double an = spectral_norm(a);
    if (an == 0.0) continue;
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      const Vector aw = a * basis.col(j);
      const double dist = (aw - proj * aw).norm();
      worst = std::max(worst, dist / (an * basis.col(j).norm()));
    }
  }
  return worst;
}

namespace {

constexpr double kEigTol = 1e-9;

Matrix orthonormal_basis(const Matrix& cols, double rel_tol) {
  if (cols.cols() == 0) return Matrix(cols.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(cols);
  qr.setThreshold(rel_tol);
  const auto rank = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(cols.rows(), rank);
  return q;
}

IrreducibilityVerdict reducible(Matrix w, std::string method) {
  return {IrreducibilityVerdict::Status::Reducible, std::move(w), std::move(method)};
}

IrreducibilityVerdict decide_dim2(const MatrixSet& set) {
  const Matrix* pivot = nullptr;
  for (const auto& a : set.matrices()) {
    const Matrix dev = a - 0.5 * a.trace() * Matrix::Identity(2, 2);
    if (dev.norm() > kEigTol * std::max(a.norm(), 1e-300)) {
      pivot = &a;
      break;
    }
  }
  if (pivot == nullptr) {
    Matrix w = Matrix::Zero(2, 1);
    w(0, 0) = 1.0;
    return reducible(w, "all generators scalar: every line is invariant");
  }
  const Matrix& m = *pivot;
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double tr = a + d;
  const double disc = tr * tr - 4.0 * (a * d - b * c);
  const double mn = spectral_norm(m);
  if (disc < 0.0 && 0.5 * std::sqrt(-disc) > kEigTol * mn)
    return {IrreducibilityVerdict::Status::Irreducible, Matrix(2, 0),
            "generator without real eigenvectors (d = 2 exact test)"};

  const double root = std::sqrt(std::max(disc, 0.0));
  std::vector<Vec2> candidates;
  for (double lambda : {0.5 * (tr + root), 0.5 * (tr - root)}) {
    Vec2 v1(b, lambda - a);
    Vec2 v2(lambda - d, c);
    Vec2 v = v1.norm() >= v2.norm() ? v1 : v2;
    if (v.norm() == 0.0) continue;
    candidates.push_back(v.normalized());
  }
  for (const auto& w : candidates) {
    bool common = true;
    for (const auto& g : set.matrices()) {
      const Vec2 gw = g * w;
      if (std::abs(cross(w, gw)) > kEigTol * spectral_norm(g)) {
        common = false;
        break;
      }
    }
    if (common) return reducible(Matrix(w), "common real eigenvector (d = 2 exact test)");
  }
  return {IrreducibilityVerdict::Status::Irreducible, Matrix(2, 0),
          "no common real eigenvector (d = 2 exact test)"};
}

// Orthonormal basis (as flattened d*d vectors) of the unital algebra
// generated by the set; grown breadth-first by left multiplication.
std::vector<Matrix> algebra_basis(const MatrixSet& set) {
  const auto d = static_cast<Eigen::Index>(set.dim());
  const Eigen::Index full = d * d;
  std::vector<Matrix> basis;      // matrices, orthonormal in Frobenius
  std::deque<Matrix> queue;
  auto try_add = [&](const Matrix& x) {
    Matrix r = x;
    for (const auto& e : basis) r -= (e.cwiseProduct(r).sum()) * e;
    for (const auto& e : basis) r -= (e.cwiseProduct(r).sum()) * e;  // reorthogonalize
    if (r.norm() <= 1e-9 * std::max(x.norm(), 1e-300)) return false;
    basis.push_back(r / r.norm());
    queue.push_back(x / x.norm());
    return true;
  };
  try_add(Matrix::Identity(d, d));
  while (!queue.empty() && static_cast<Eigen::Index>(basis.size()) < full) {
    const Matrix x = queue.front();
    queue.pop_front();
    for (const auto& g : set.matrices()) {
      if (g.norm() == 0.0) continue;
      try_add(g * x);
      if (static_cast<Eigen::Index>(basis.size()) == full) break;
    }
  }
  return basis;
}

// Smallest subspace containing span(seed) and invariant under the algebra.
Matrix cyclic_closure(const std::vector<Matrix>& algebra, const Matrix& seed) {
  Matrix cols(seed.rows(), static_cast<Eigen::Index>(algebra.size()) * seed.cols());
  Eigen::Index k = 0;
  for (const auto& e : algebra)
    for (Eigen::Index j = 0; j < seed.cols(); ++j) cols.col(k++) = e * seed.col(j);
  return orthonormal_basis(cols, 1e-9);
}

std::optional<Matrix> search_invariant(const std::vector<Matrix>& algebra, const Matrix& element,
                                       bool& simple_spectrum) {
  const Eigen::Index d = element.rows();
  Eigen::EigenSolver<Matrix> es(element, true);
  const auto& vals = es.eigenvalues();
  const double scale = std::max(element.norm(), 1e-300);
  simple_spectrum = true;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      if (std::abs(vals(i) - vals(j)) < 1e-6 * scale) simple_spectrum = false;
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::VectorXcd x = es.eigenvectors().col(i);
    Matrix seed(d, 2);
    seed.col(0) = x.real();
    seed.col(1) = x.imag();
    const Matrix w0 = orthonormal_basis(seed, 1e-9);
    if (w0.cols() == 0) continue;
    Matrix w = cyclic_closure(algebra, w0);
    if (w.cols() > 0 && w.cols() < d) return w;
  }
  return std::nullopt;
}

IrreducibilityVerdict decide_general(const MatrixSet& set) {
  const auto d = static_cast<Eigen::Index>(set.dim());
  const auto algebra = algebra_basis(set);
  if (static_cast<Eigen::Index>(algebra.size()) == d * d)
    return {IrreducibilityVerdict::Status::Irreducible, Matrix(d, 0),
            "generated algebra spans all d x d matrices"};

  Lcg64 rng(0x5eedULL);
  Matrix element = Matrix::Zero(d, d);
  for (const auto& e : algebra) element += rng.normal() * e;

  bool simple = false;
  if (auto w = search_invariant(algebra, element, simple)) {
    if (invariance_defect(set, *w) <= kEigTol)
      return reducible(*w, "cyclic subspace of an algebra eigenvector");
  }
  // Invariant subspaces of the transposed algebra give invariant complements.
  std::vector<Matrix> transposed;
  transposed.reserve(algebra.size());
  for (const auto& e : algebra) transposed.push_back(e.transpose());
  bool simple_t = false;
  if (auto u = search_invariant(transposed, element.transpose(), simple_t)) {
    const Matrix full = Matrix::Identity(d, d) - (*u) * u->transpose();
    const Matrix w = orthonormal_basis(full, 1e-9);
    if (w.cols() > 0 && w.cols() < d && invariance_defect(set, w) <= kEigTol)
      return reducible(w, "orthogonal complement of a transposed-algebra invariant subspace");
  }
  if (simple)
    return {IrreducibilityVerdict::Status::Irreducible, Matrix(d, 0),
            "random algebra element has simple spectrum and no eigenvector generates a proper "
            "invariant subspace"};
  return {IrreducibilityVerdict::Status::Inconclusive, Matrix(d, 0),
          "algebra is span-deficient and the eigenvector search found no invariant subspace"};
}

}  // namespace

IrreducibilityVerdict irreducibility(const MatrixSet& set) {
  if (set.dim() == 1)
    return {IrreducibilityVerdict::Status::Irreducible, Matrix(1, 0),
            "d = 1 has no proper nonzero subspace"};
  if (set.dim() == 2) return decide_dim2(set);
  return decide_general(set);
}

bool rank_one_diagnostic(std::span<const Matrix> mats, double tol) {
  for (const auto& m : mats) {
    if (m.norm() <= tol) continue;
    if (second_singular_value(m) > tol) return false;
  }
  return true;
}

}  // namespace barabanov
