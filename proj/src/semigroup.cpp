#include "barabanov/semigroup.hpp"

#include "barabanov/error.hpp"
#include "barabanov/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace barabanov {

// ------------------------------------------------------------ RunLengthWord

RunLengthWord RunLengthWord::from_indices(std::span<const std::size_t> indices) {
  RunLengthWord w;
  for (std::size_t i : indices) {
    if (!w.runs.empty() && w.runs.back().first == i)
      ++w.runs.back().second;
    else
      w.runs.emplace_back(i, 1);
  }
  return w;
}

std::size_t RunLengthWord::length() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.second;
  return n;
}

std::string RunLengthWord::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i) os << ' ';
    os << runs[i].first;
    if (runs[i].second > 1) os << '^' << runs[i].second;
  }
  return os.str();
}

Matrix scaled_word_product(const MatrixSet& set, double rho_hat, const RunLengthWord& word) {
  Matrix cur = Matrix::Identity(set.dim(), set.dim());
  for (const auto& [idx, count] : word.runs) {
    if (idx >= set.size()) throw std::out_of_range("word index out of range");
    for (std::size_t c = 0; c < count; ++c) cur = (set[idx] * cur) / rho_hat;
  }
  return cur;
}

// ------------------------------------------------------------------ sampling

namespace {

constexpr std::size_t kMaxPowerLength = std::size_t{1} << 16;

bool element_less(const SemigroupElement& a, const SemigroupElement& b) {
  if (a.length != b.length) return a.length < b.length;
  return a.word < b.word;
}

}  // namespace

SemigroupSample sample_limit_semigroup(const MatrixSet& set, double rho_hat,
                                       const SampleOptions& options) {
  if (options.min_length == 0) throw std::invalid_argument("min_length must be >= 1");
  if (options.min_length > options.max_length)
    throw std::invalid_argument("min_length must not exceed max_length");
  if (!(rho_hat > 0.0)) throw std::invalid_argument("rho_hat must be positive");
  const std::size_t power_length =
      options.power_length == 0 ? options.max_length : options.power_length;
  if (power_length > kMaxPowerLength) throw std::invalid_argument("power_length must be <= 65536");

  SemigroupSample sample;
  sample.rho_hat = rho_hat;
  sample.min_length = options.min_length;
  sample.max_length = options.max_length;
  sample.power_length = power_length;
  sample.dedupe_tol = options.dedupe_tol;

  std::vector<SemigroupElement> all;
  for (auto& pw : enumerate_products(set, options.max_length, rho_hat, options.keep_threshold,
                                     options.dedupe_tol)) {
    if (pw.length() < options.min_length) continue;
    SemigroupElement e;
    e.word = RunLengthWord::from_indices(pw.indices);
    e.length = pw.length();
    e.value = scaled_word_product(set, rho_hat, e.word);
    e.scaled_norm = spectral_norm(e.value);
    if (e.scaled_norm >= options.keep_threshold) all.push_back(std::move(e));
  }

  // Power orbits of single generators, beyond the enumeration depth.
  const bool contracting = set.max_spectral_norm() <= rho_hat;
  for (std::size_t i = 0; i < set.size(); ++i) {
    Matrix cur = Matrix::Identity(set.dim(), set.dim());
    for (std::size_t n = 1; n <= power_length; ++n) {
      cur = (set[i] * cur) / rho_hat;
      const double nrm = spectral_norm(cur);
      if (!std::isfinite(nrm) || nrm > 1e12) break;
      if (nrm < options.keep_threshold) {
        if (contracting) break;
        continue;
      }
      if (n < options.min_length || n <= options.max_length) continue;
      SemigroupElement e;
      e.word.runs.emplace_back(i, n);
      e.length = n;
      e.value = cur;
      e.scaled_norm = nrm;
      all.push_back(std::move(e));
    }
  }

  // Near duplicates collapse onto the longest representative.
  std::sort(all.begin(), all.end(), [](const SemigroupElement& a, const SemigroupElement& b) {
    if (a.length != b.length) return a.length > b.length;
    return a.word < b.word;
  });
  std::vector<Matrix> vals;
  vals.reserve(all.size());
  for (const auto& e : all) vals.push_back(e.value);
  for (std::size_t k : dedupe_by_frobenius(vals, options.dedupe_tol))
    sample.elements.push_back(std::move(all[k]));
  std::sort(sample.elements.begin(), sample.elements.end(), element_less);
  return sample;
}

// -------------------------------------------------------------- transitivity

namespace {

constexpr std::size_t kCandidateCap = 256;
constexpr double kLambdaMin = 1e-6;
constexpr double kLambdaMax = 1e6;

}  // namespace

TransitivityReport transitivity_check(const SemigroupSample& sample,
                                      std::span<const std::pair<Vector, Vector>> pairs,
                                      double tol) {
  if (sample.empty()) throw std::invalid_argument("transitivity_check needs a non-empty sample");
  if (pairs.empty()) throw std::invalid_argument("transitivity_check needs at least one pair");
  const std::size_t d = static_cast<std::size_t>(sample.elements.front().value.rows());

  TransitivityReport rep;
  rep.tol = tol;
  rep.pairs_tested = pairs.size();
  rep.satisfied = true;

  struct Cand {
    std::size_t idx;
    double lambda;
    double err;
  };
  std::vector<Vector> images(sample.size());
  for (const auto& [v1, v2] : pairs) {
    if (static_cast<std::size_t>(v1.size()) != d || static_cast<std::size_t>(v2.size()) != d)
      throw std::invalid_argument("transitivity pair dimension mismatch");
    const double v2sq = v2.squaredNorm();
    if (!(v2sq > 0.0) || !(v1.squaredNorm() > 0.0))
      throw std::invalid_argument("transitivity pairs must be nonzero");

    std::vector<Cand> cands;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const Vector w = sample.elements[i].value * v1;
      const double lambda = w.dot(v2) / v2sq;
      if (!(std::abs(lambda) >= kLambdaMin && std::abs(lambda) <= kLambdaMax)) continue;
      cands.push_back({i, lambda, (w - lambda * v2).norm()});
    }
    const auto by_err = [](const Cand& a, const Cand& b) {
      return a.err < b.err || (a.err == b.err && a.idx < b.idx);
    };
    if (cands.size() > kCandidateCap) {
      std::partial_sort(cands.begin(), cands.begin() + kCandidateCap, cands.end(), by_err);
      cands.resize(kCandidateCap);
    } else {
      std::sort(cands.begin(), cands.end(), by_err);
    }
    for (std::size_t i = 0; i < sample.size(); ++i) images[i] = sample.elements[i].value * v2;

    double best = std::numeric_limits<double>::infinity();
    TransitivityWitness wit;
    for (const auto& c : cands) {
      if (c.err >= best) break;  // sorted: no later candidate can improve
      const Vector target = v1 / c.lambda;
      for (std::size_t j = 0; j < sample.size(); ++j) {
        const double eb = (images[j] - target).norm();
        const double e = std::max(c.err, eb);
        if (e < best) {
          best = e;
          wit = {v1, v2, c.idx, j, c.lambda, c.err, eb};
        }
      }
    }
    rep.worst_error = std::max(rep.worst_error, best);
    if (best <= tol) {
      rep.witnesses.push_back(std::move(wit));
    } else {
      rep.satisfied = false;
      rep.failures.push_back({v1, v2, best});
    }
  }
  return rep;
}

TransitivityReport transitivity_check(const SemigroupSample& sample, std::size_t pairs, double tol,
                                      std::uint64_t seed) {
  if (sample.empty()) throw std::invalid_argument("transitivity_check needs a non-empty sample");
  if (pairs == 0) throw std::invalid_argument("pairs must be >= 1");
  const auto d = sample.elements.front().value.rows();
  Lcg64 rng(seed);
  auto draw = [&] {
    Vector v(d);
    do {
      for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.normal();
    } while (!(v.norm() > 0.0));
    return Vector(v / v.norm());
  };
  std::vector<std::pair<Vector, Vector>> ps;
  ps.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    Vector v1 = draw();
    Vector v2 = draw();
    ps.emplace_back(std::move(v1), std::move(v2));
  }
  auto rep = transitivity_check(sample, ps, tol);
  rep.seed = seed;
  return rep;
}

// ------------------------------------------------------------ rotation groups

std::string to_string(RotationSubgroup::Kind k) {
  switch (k) {
    case RotationSubgroup::Kind::None:
      return "none";
    case RotationSubgroup::Kind::Finite:
      return "finite";
    case RotationSubgroup::Kind::DenseInSO2:
      return "denseInSO2";
  }
  return "none";
}

RotationSubgroup detect_rotation_subgroup(const SemigroupSample& sample, double tol) {
  RotationSubgroup out;
  if (sample.empty()) return out;
  if (sample.elements.front().value.rows() != 2)
    throw std::invalid_argument("detect_rotation_subgroup requires d = 2");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  std::vector<double> angles;
  for (const auto& e : sample.elements) {
    const Matrix& m = e.value;
    if ((m.transpose() * m - Matrix::Identity(2, 2)).norm() > tol) continue;
    if (m.determinant() <= 0.0) continue;
    double a = std::atan2(m(1, 0), m(0, 0));
    if (a < 0.0) a += kTwoPi;
    angles.push_back(a);
  }
  if (angles.empty()) return out;
  std::sort(angles.begin(), angles.end());
  const double merge = std::max(tol, 1e-12);
  std::vector<double> distinct;
  for (double a : angles)
    if (distinct.empty() || a - distinct.back() > merge) distinct.push_back(a);
  if (distinct.size() > 1 && distinct.front() + kTwoPi - distinct.back() <= merge)
    distinct.pop_back();
  const std::size_t n = distinct.size();
  out.distinct_angles = n;

  out.max_gap = distinct.front() + kTwoPi - distinct.back();
  for (std::size_t i = 1; i < n; ++i) out.max_gap = std::max(out.max_gap, distinct[i] - distinct[i - 1]);

  const double step = kTwoPi / static_cast<double>(n);
  bool cyclic = true;
  for (double a : distinct) {
    const double t = a / step;
    if (std::abs(t - std::round(t)) * step > tol) {
      cyclic = false;
      break;
    }
  }
  if (cyclic) {
    out.kind = RotationSubgroup::Kind::Finite;
    out.order = static_cast<std::int64_t>(n);
  } else if (n >= 64 && out.max_gap < kTwoPi / 64.0) {
    out.kind = RotationSubgroup::Kind::DenseInSO2;
  }
  return out;
}

bool rank_one_diagnostic(const SemigroupSample& sample, double tol) {
  std::vector<Matrix> vals;
  vals.reserve(sample.size());
  for (const auto& e : sample.elements) vals.push_back(e.value);
  return rank_one_diagnostic(std::span<const Matrix>(vals), tol);
}

// ---------------------------------------------------------------- verdicts

std::string to_string(UniquenessVerdict::Kind k) {
  switch (k) {
    case UniquenessVerdict::Kind::UniqueCertifiedNumerically:
      return "UniqueCertifiedNumerically";
    case UniquenessVerdict::Kind::NotUnique:
      return "NotUnique";
    case UniquenessVerdict::Kind::Undetermined:
      return "Undetermined";
  }
  return "Undetermined";
}

UniquenessVerdict uniqueness_verdict(const MatrixSet& set, const UniquenessConfig& config) {
  const auto irr = irreducibility(set);
  if (irr.status != IrreducibilityVerdict::Status::Irreducible)
    throw ReducibleInputError("uniqueness_verdict requires an irreducible set (irreducibility: " +
                              to_string(irr.status) + ", " + irr.method + ")");

  UniquenessVerdict v;
  v.jsr = jsr_bounds(set, config.jsr_depth, config.prune_ratio);
  if (set.dim() == 2) {
    // The bracket is similarity invariant; an eigenframe of a generator is
    // often a much better working norm than the Euclidean one.
    for (std::size_t i = 0; i < set.size(); ++i) {
      try {
        const auto frame = eigen_frame(set[i]);
        auto b = jsr_bounds(set.conjugated(frame.s), config.jsr_depth, config.prune_ratio);
        if (b.upper - b.lower < v.jsr.upper - v.jsr.lower) v.jsr = std::move(b);
      } catch (const NotInPerturbationSetError&) {
      }
    }
  }
  if (!(v.jsr.lower > 0.0)) throw Error("joint spectral radius bracket has lower end 0");
  if (v.jsr.upper - v.jsr.lower > config.jsr_rel_tol * v.jsr.upper) {
    std::ostringstream os;
    os.precision(17);
    os << "JSR interval [" << v.jsr.lower << ", " << v.jsr.upper << "] is wider than "
       << config.jsr_rel_tol << " relative; refusing to certify";
    throw Error(os.str());
  }
  v.rho_hat = v.jsr.lower;
  const double rho_hat = v.rho_hat;

  v.sample = sample_limit_semigroup(set, rho_hat, config.sample);
  if (set.dim() == 2) v.rotations = detect_rotation_subgroup(v.sample);
  v.rank_one = rank_one_diagnostic(v.sample, 1e-9);

  bool rational_pivot = false;
  bool undeclared_float = false;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& tag = set.rotation_angle(i);
    if (!tag) continue;
    if (std::abs(spectral_radius(set[i]) - rho_hat) > 1e-9 * rho_hat) continue;
    if (tag->is_rational())
      rational_pivot = true;
    else if (!tag->declared_irrational())
      undeclared_float = true;
  }

  if (rational_pivot) {
    auto fam = certified_norm_family(set, rho_hat, config.family);
    if (fam && fam->norms.size() >= 2) {
      v.kind = UniquenessVerdict::Kind::NotUnique;
      v.notes.push_back("exact rational rotation generator at rho_hat: " +
                        std::to_string(fam->norms.size()) +
                        " certified non-proportional Barabanov norms");
      v.family = std::move(fam);
      return v;
    }
    v.notes.push_back("rational rotation generator present but fewer than 2 norms certified");
  }

  if (v.sample.empty()) {
    v.notes.push_back("semigroup sample is empty (all products below the keep threshold)");
    return v;
  }
  v.transitivity = transitivity_check(v.sample, config.pairs, config.tol, config.seed);
  if (v.transitivity->satisfied) {
    if (undeclared_float) {
      v.notes.push_back(
          "transitivity satisfied, but a float rotation angle carries no irrationality "
          "declaration; rationality is not inferred from floats");
      return v;
    }
    v.kind = UniquenessVerdict::Kind::UniqueCertifiedNumerically;
    v.notes.push_back("transitivity satisfied on all sampled pairs");
    return v;
  }
  v.notes.push_back("transitivity failed on " + std::to_string(v.transitivity->failures.size()) +
                    " of " + std::to_string(v.transitivity->pairs_tested) + " pairs");
  return v;
}

}  // namespace barabanov
