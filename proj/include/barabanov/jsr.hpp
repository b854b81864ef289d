#pragma once

#include "barabanov/matset.hpp"

#include <cstddef>
#include <vector>

namespace barabanov {

struct DepthBound {
  std::size_t depth = 0;
  double lower = 0.0;  ///< running lower bound after this depth
  double upper = 0.0;  ///< running upper bound after this depth
};

/// Two-sided bracket lower <= jsr(A) <= upper.
struct JsrBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t depth = 0;
  std::size_t pruned_count = 0;
  std::vector<DepthBound> per_depth;
  /// True when some product was pruned and the pruning floor
  /// prune_ratio * lower (rather than a surviving product norm) determined
  /// the upper bound at the final depth.
  bool pruning_affected_upper = false;
};

/// Branch-and-bound bracket on the joint spectral radius.
///
/// Products are explored breadth first. At depth n each product P updates
/// the lower bound with rho(P)^{1/n}; products with |P| < (r * lower)^n are
/// discarded (r = prune_ratio). Every infinite product splits into blocks
/// that were either pruned (growth rate below r * lower) or survived to
/// depth n, so jsr <= max(r * lower, max_surviving |P|^{1/n}); the running
/// minimum of that quantity over depths is reported as upper. The spectral
/// norm is the working norm.
///
/// Throws std::invalid_argument on max_depth == 0 or prune_ratio outside
/// (0, 1], and barabanov::Error if the product tree exceeds max_products.
JsrBounds jsr_bounds(const MatrixSet& set, std::size_t max_depth, double prune_ratio = 0.999,
                     std::size_t max_products = std::size_t{1} << 22);

/// All words of length 1..depth whose scaled value scale^{-len} * value has
/// spectral norm >= keep_threshold, ordered by length then lexicographically.
///
/// Subtrees are cut below the threshold only when max_a |A| <= scale (then
/// no extension can climb back). merge_tol > 0 additionally merges words of
/// equal length whose values agree within merge_tol in Frobenius norm (the
/// lexicographically first is kept); the default 0 enumerates every word.
std::vector<ProductWord> enumerate_products(const MatrixSet& set, std::size_t depth, double scale,
                                            double keep_threshold, double merge_tol = 0.0);

}  // namespace barabanov
