#include "barabanov/jsr.hpp"

#include "barabanov/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace barabanov {

namespace {

struct Node {
  std::vector<std::size_t> word;
  Matrix value;
};

}  // namespace

JsrBounds jsr_bounds(const MatrixSet& set, std::size_t max_depth, double prune_ratio,
                     std::size_t max_products) {
  if (max_depth == 0) throw std::invalid_argument("max_depth must be >= 1");
  if (!(prune_ratio > 0.0 && prune_ratio <= 1.0))
    throw std::invalid_argument("prune_ratio must lie in (0, 1]");

  // Work on the set divided by a power of two so that scaling the input by
  // a power of two scales the bracket exactly.
  const double max_norm_in = set.max_spectral_norm();
  const double unit = max_norm_in > 0.0 ? std::ldexp(1.0, std::ilogb(max_norm_in)) : 1.0;
  const MatrixSet work = set.scaled(1.0 / unit);

  JsrBounds out;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  std::vector<Node> frontier{{{}, Matrix::Identity(work.dim(), work.dim())}};
  for (std::size_t n = 1; n <= max_depth; ++n) {
    std::vector<Node> level;
    level.reserve(frontier.size() * work.size());
    if (frontier.size() * work.size() > max_products)
      throw Error("jsr_bounds: product tree exceeds " + std::to_string(max_products) +
                  " products at depth " + std::to_string(n));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (const auto& node : frontier) {
      for (std::size_t a = 0; a < work.size(); ++a) {
        Node child{node.word, work[a] * node.value};
        child.word.push_back(a);
        lower = std::max(lower, std::pow(spectral_radius(child.value), inv_n));
        level.push_back(std::move(child));
      }
    }
    // Pruning uses the lower bound after the whole level has been scored so
    // the outcome does not depend on visiting order.
    const double floor_rate = prune_ratio * lower;
    const double floor_norm = std::pow(floor_rate, static_cast<double>(n));
    std::vector<Node> survivors;
    survivors.reserve(level.size());
    double max_norm = 0.0;
    for (auto& node : level) {
      const double nrm = spectral_norm(node.value);
      if (nrm < floor_norm) {
        ++out.pruned_count;
        continue;
      }
      max_norm = std::max(max_norm, nrm);
      survivors.push_back(std::move(node));
    }
    const double survivor_rate = std::pow(max_norm, inv_n);
    double depth_upper = survivor_rate;
    bool floor_binding = false;
    if (out.pruned_count > 0 && floor_rate > survivor_rate) {
      depth_upper = floor_rate;
      floor_binding = true;
    }
    depth_upper = std::max(depth_upper, lower);
    if (depth_upper < upper) {
      upper = depth_upper;
      out.pruning_affected_upper = floor_binding;
    }
    // A later lower bound can exceed an earlier upper by rounding only.
    upper = std::max(upper, lower);
    out.per_depth.push_back({n, lower, upper});
    out.depth = n;
    frontier = std::move(survivors);
    if (frontier.empty()) break;  // only reachable through rounding
  }
  out.lower = lower * unit;
  out.upper = upper * unit;
  for (auto& d : out.per_depth) {
    d.lower *= unit;
    d.upper *= unit;
  }
  return out;
}

std::vector<ProductWord> enumerate_products(const MatrixSet& set, std::size_t depth, double scale,
                                            double keep_threshold, double merge_tol) {
  if (depth == 0) throw std::invalid_argument("depth must be >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be > 0");
  const bool may_cut = set.max_spectral_norm() <= scale;

  std::vector<ProductWord> out;
  std::vector<ProductWord> frontier{{{}, Matrix::Identity(set.dim(), set.dim())}};
  for (std::size_t n = 1; n <= depth && !frontier.empty(); ++n) {
    const double scale_n = std::pow(scale, static_cast<double>(n));
    std::vector<ProductWord> level;
    level.reserve(frontier.size() * set.size());
    for (const auto& node : frontier) {
      for (std::size_t a = 0; a < set.size(); ++a) {
        ProductWord child{node.indices, set[a] * node.value};
        child.indices.push_back(a);
        level.push_back(std::move(child));
      }
    }
    if (merge_tol > 0.0) {
      std::vector<Matrix> vals;
      vals.reserve(level.size());
      for (const auto& w : level) vals.push_back(w.value / scale_n);
      const auto kept = dedupe_by_frobenius(vals, merge_tol);
      std::vector<ProductWord> merged;
      merged.reserve(kept.size());
      for (std::size_t k : kept) merged.push_back(std::move(level[k]));
      level = std::move(merged);
    }
    std::vector<ProductWord> next;
    next.reserve(level.size());
    for (auto& w : level) {
      const bool keep = spectral_norm(w.value) / scale_n >= keep_threshold;
      if (keep) out.push_back(w);
      if (keep || !may_cut) next.push_back(std::move(w));
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace barabanov
