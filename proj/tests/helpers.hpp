#pragma once

#include "barabanov/linalg.hpp"

#include <cmath>
#include <random>

namespace testing {

inline barabanov::Matrix mat2(double a, double b, double c, double d) {
  barabanov::Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline barabanov::Vector vec2(double x, double y) {
  barabanov::Vector v(2);
  v << x, y;
  return v;
}

inline barabanov::Matrix random_matrix(std::mt19937_64& rng, int d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  barabanov::Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = n(rng);
  return m;
}

/// Random invertible 2x2 with condition number below `max_cond`.
inline barabanov::Matrix random_well_conditioned(std::mt19937_64& rng, double max_cond = 100.0) {
  while (true) {
    barabanov::Matrix t = random_matrix(rng, 2);
    Eigen::JacobiSVD<barabanov::Matrix> svd(t);
    const auto sv = svd.singularValues();
    if (sv(1) > 0 && sv(0) / sv(1) < max_cond) return t;
  }
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing
