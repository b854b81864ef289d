#include "barabanov/report.hpp"

#include "barabanov/config.hpp"

#include <cmath>

namespace barabanov {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json to_json(const JsrBounds& b) {
  json per = json::array();
  for (const auto& d : b.per_depth)
    per.push_back({{"depth", d.depth}, {"lower", number(d.lower)}, {"upper", number(d.upper)}});
  return {{"lower", number(b.lower)},
          {"upper", number(b.upper)},
          {"depth", b.depth},
          {"pruned_count", b.pruned_count},
          {"pruning_affected_upper", b.pruning_affected_upper},
          {"per_depth", per}};
}

json to_json(const ResidualReport& r) {
  return {{"max_residual", number(r.max_residual)},
          {"worst_direction", to_json(Vector(r.worst_direction))},
          {"grid_size", r.grid_size},
          {"onesided", to_string(r.onesided)},
          {"rho_hat", number(r.rho_hat)},
          {"max_excess", number(r.max_excess)},
          {"max_deficit", number(r.max_deficit)}};
}

json to_json(const RotationSubgroup& r) {
  json j{{"kind", to_string(r.kind)},
         {"distinct_angles", r.distinct_angles},
         {"max_gap", number(r.max_gap)}};
  j["order"] = r.kind == RotationSubgroup::Kind::Finite ? json(r.order) : json(nullptr);
  return j;
}

json to_json(const SemigroupSample& s, bool elements) {
  json j{{"size", s.size()},
         {"rho_hat", number(s.rho_hat)},
         {"min_length", s.min_length},
         {"max_length", s.max_length},
         {"power_length", s.power_length},
         {"dedupe_tol", number(s.dedupe_tol)}};
  if (elements) {
    json es = json::array();
    for (const auto& e : s.elements)
      es.push_back({{"word", e.word.to_string()},
                    {"length", e.length},
                    {"scaled_norm", number(e.scaled_norm)},
                    {"matrix", to_json(e.value)}});
    j["elements"] = es;
  }
  return j;
}

json to_json(const TransitivityReport& r, const SemigroupSample& s) {
  json wit = json::array();
  for (const auto& w : r.witnesses) {
    const auto& b1 = s.elements[w.b1];
    const auto& b2 = s.elements[w.b2];
    wit.push_back({{"v1", to_json(w.v1)},
                   {"v2", to_json(w.v2)},
                   {"b1", to_json(b1.value)},
                   {"b1_word", b1.word.to_string()},
                   {"b2", to_json(b2.value)},
                   {"b2_word", b2.word.to_string()},
                   {"lambda", number(w.lambda)},
                   {"err_forward", number(w.err_forward)},
                   {"err_backward", number(w.err_backward)}});
  }
  json fails = json::array();
  for (const auto& f : r.failures)
    fails.push_back({{"v1", to_json(f.v1)}, {"v2", to_json(f.v2)}, {"best_error", number(f.best_error)}});
  return {{"satisfied", r.satisfied},
          {"pairs_tested", r.pairs_tested},
          {"tol", number(r.tol)},
          {"seed", r.seed},
          {"worst_error", number(r.worst_error)},
          {"witnesses", wit},
          {"failures", fails}};
}

json to_json(const PerturbationPair& p) {
  json j{{"b1", to_json(p.b1)},
         {"b2", to_json(p.b2)},
         {"frame_s", to_json(p.frame.s)},
         {"rho", number(p.frame.rho)},
         {"angle_radians", number(p.frame.angle)},
         {"b1_c_norm", number(p.b1_c_norm)},
         {"xi", number(p.xi)},
         {"k_const", number(p.k_const)},
         {"kappa_max", number(p.kappa_max)}};
  j["b2_angle"] = p.b2_angle ? angle_to_json(*p.b2_angle) : json(nullptr);
  return j;
}

json to_json(const UniquenessVerdict& v) {
  json j{{"verdict", to_string(v.kind)},
         {"rho_hat", number(v.rho_hat)},
         {"jsr", to_json(v.jsr)},
         {"sample", to_json(v.sample, false)},
         {"rotation_subgroup", to_json(v.rotations)},
         {"rank_one", v.rank_one},
         {"notes", v.notes}};
  j["transitivity"] = v.transitivity ? to_json(*v.transitivity, v.sample) : json(nullptr);
  return j;
}

}  // namespace barabanov
