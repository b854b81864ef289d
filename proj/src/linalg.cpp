#include "barabanov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace barabanov {

double spectral_norm(const Matrix& m) {
  if (m.rows() == 2 && m.cols() == 2) {
    const double fro2 = m.squaredNorm();
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
    return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
  }
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double second_singular_value(const Matrix& m) {
  if (m.rows() < 2 || m.cols() < 2) return 0.0;
  if (m.rows() == 2 && m.cols() == 2) {
    const double fro2 = m.squaredNorm();
    const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    const double smax = spectral_norm(m);
    // sigma1 * sigma2 = |det|
    return smax > 0.0 ? std::min(det / smax, std::sqrt(std::max(0.0, fro2 - smax * smax)))
                      : 0.0;
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(1);
}

double spectral_radius(const Matrix& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  if (m.rows() == 2) {
    // Eigenvalues mid +- sqrt(q). q is formed without the tr^2 - 4 det
    // cancellation, which costs sqrt(eps) near a double eigenvalue.
    const double mid = 0.5 * (m(0, 0) + m(1, 1));
    const double half_gap = 0.5 * (m(0, 0) - m(1, 1));
    const double q = half_gap * half_gap + m(0, 1) * m(1, 0);
    if (q >= 0.0) return std::abs(mid) + std::sqrt(q);
    return std::sqrt(mid * mid - q);
  }
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double sup_operator_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

std::vector<double> angle_grid(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
  return out;
}

std::vector<std::size_t> dedupe_by_frobenius(std::span<const Matrix> mats, double tol) {
  // Bucketed on the (0,0) entry: two matrices within tol in Frobenius norm
  // are within tol in every entry.
  std::multimap<double, std::size_t> index;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const Matrix& m = mats[i];
    const double key = m.size() ? m(0, 0) : 0.0;
    bool duplicate = false;
    for (auto it = index.lower_bound(key - tol); it != index.end() && it->first <= key + tol;
         ++it) {
      if ((mats[it->second] - m).norm() < tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      index.emplace(key, i);
      kept.push_back(i);
    }
  }
  return kept;
}

}  // namespace barabanov
