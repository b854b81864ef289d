#include "barabanov/config.hpp"

#include "barabanov/constructions.hpp"
#include "barabanov/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <stdexcept>

namespace barabanov {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

std::string type_name(const json& j) { return j.type_name(); }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : obj.items())
    if (!ok.count(k)) fail(path + "." + k, "unknown field");
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected object, got " + type_name(j));
  return j;
}

std::size_t get_count(const json& obj, const char* key, const std::string& path, std::size_t def,
                      std::size_t min_value = 0) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  const std::string p = path + "." + key;
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail(p, "expected non-negative integer, got " + v.dump());
  const auto n = v.get<std::uint64_t>();
  if (n < min_value) fail(p, "must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(n);
}

double get_real(const json& obj, const char* key, const std::string& path, double def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  const std::string p = path + "." + key;
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_decimal(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(p, e.what());
    }
  }
  fail(p, "expected number or decimal string, got " + type_name(v));
}

double get_positive(const json& obj, const char* key, const std::string& path, double def) {
  const double x = get_real(obj, key, path, def);
  if (!(x > 0.0) || !std::isfinite(x)) fail(path + "." + key, "must be positive and finite");
  return x;
}

std::string get_string(const json& obj, const char* key, const std::string& path, std::string def,
                       std::initializer_list<const char*> choices) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  const std::string p = path + "." + key;
  if (!v.is_string()) fail(p, "expected string, got " + type_name(v));
  const auto s = v.get<std::string>();
  std::string list;
  for (const char* c : choices) {
    if (s == c) return s;
    list += (list.empty() ? "" : ", ") + std::string(c);
  }
  fail(p, "'" + s + "' is not one of: " + list);
}

std::string entry_text(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    try {
      (void)parse_decimal(s);
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
    return s;
  }
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  fail(path, "expected decimal string, got " + type_name(v));
}

TextMatrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected non-empty array of rows");
  TextMatrix m;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const json& row = j[r];
    if (!row.is_array()) fail(rp, "expected array of entries");
    if (row.size() != j.size()) fail(rp, "matrix must be square (" + std::to_string(j.size()) + " entries per row)");
    std::vector<std::string> out;
    for (std::size_t c = 0; c < row.size(); ++c)
      out.push_back(entry_text(row[c], rp + "[" + std::to_string(c) + "]"));
    m.push_back(std::move(out));
  }
  return m;
}

json matrix_to_json_text(const TextMatrix& m) {
  json rows = json::array();
  for (const auto& r : m) rows.push_back(r);
  return rows;
}

SetSpec set_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  SetSpec s;
  const std::string kind = get_string(j, "kind", path, "matrices",
                                      {"matrices", "example1", "example2", "projections", "theorem2"});
  if (kind == "matrices") {
    check_keys(j, path, {"kind", "matrices", "labels", "angles"});
    s.kind = SetSpec::Kind::Matrices;
    if (!j.contains("matrices")) fail(path + ".matrices", "required field missing");
    const json& ms = j.at("matrices");
    if (!ms.is_array() || ms.empty()) fail(path + ".matrices", "expected non-empty array of matrices");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      s.matrices.push_back(matrix_from_json(ms[i], path + ".matrices[" + std::to_string(i) + "]"));
      if (s.matrices.back().size() != s.matrices.front().size())
        fail(path + ".matrices[" + std::to_string(i) + "]", "all matrices must have the same size");
    }
    if (j.contains("labels")) {
      const json& ls = j.at("labels");
      if (!ls.is_array() || ls.size() != ms.size())
        fail(path + ".labels", "expected one label per matrix");
      for (std::size_t i = 0; i < ls.size(); ++i) {
        if (!ls[i].is_string()) fail(path + ".labels[" + std::to_string(i) + "]", "expected string");
        s.labels.push_back(ls[i].get<std::string>());
      }
    }
    s.angles.assign(ms.size(), std::nullopt);
    if (j.contains("angles")) {
      const json& as = j.at("angles");
      if (!as.is_array() || as.size() != ms.size())
        fail(path + ".angles", "expected one entry (angle or null) per matrix");
      for (std::size_t i = 0; i < as.size(); ++i)
        if (!as[i].is_null()) s.angles[i] = angle_from_json(as[i], path + ".angles[" + std::to_string(i) + "]");
    }
  } else if (kind == "example1") {
    check_keys(j, path, {"kind", "theta"});
    s.kind = SetSpec::Kind::Example1;
    if (!j.contains("theta")) fail(path + ".theta", "required field missing");
    s.theta = angle_from_json(j.at("theta"), path + ".theta");
  } else if (kind == "example2") {
    check_keys(j, path, {"kind", "max_n"});
    s.kind = SetSpec::Kind::Example2;
    if (!j.contains("max_n")) fail(path + ".max_n", "required field missing");
    s.max_n = get_count(j, "max_n", path, 0, 1);
    if (s.max_n > 60) fail(path + ".max_n", "must be <= 60");
  } else if (kind == "projections") {
    check_keys(j, path, {"kind", "angles"});
    s.kind = SetSpec::Kind::Projections;
    if (!j.contains("angles") || !j.at("angles").is_array() || j.at("angles").empty())
      fail(path + ".angles", "expected non-empty array of angles");
    const json& as = j.at("angles");
    for (std::size_t i = 0; i < as.size(); ++i)
      s.projection_angles.push_back(angle_from_json(as[i], path + ".angles[" + std::to_string(i) + "]"));
  } else {
    check_keys(j, path, {"kind", "b1", "b2", "b2_angle"});
    s.kind = SetSpec::Kind::Theorem2;
    for (const char* key : {"b1", "b2"})
      if (!j.contains(key)) fail(path + "." + key, "required field missing");
    s.b1 = matrix_from_json(j.at("b1"), path + ".b1");
    s.b2 = matrix_from_json(j.at("b2"), path + ".b2");
    if (s.b1.size() != 2) fail(path + ".b1", "must be 2x2");
    if (s.b2.size() != 2) fail(path + ".b2", "must be 2x2");
    if (j.contains("b2_angle") && !j.at("b2_angle").is_null())
      s.b2_angle = angle_from_json(j.at("b2_angle"), path + ".b2_angle");
  }
  return s;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string to_string(SetSpec::Kind k) {
  switch (k) {
    case SetSpec::Kind::Matrices:
      return "matrices";
    case SetSpec::Kind::Example1:
      return "example1";
    case SetSpec::Kind::Example2:
      return "example2";
    case SetSpec::Kind::Projections:
      return "projections";
    case SetSpec::Kind::Theorem2:
      return "theorem2";
  }
  return "matrices";
}

double parse_decimal(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_double = [&](const std::string& s) {
    double x = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || ptr != e || s.empty() || !std::isfinite(x))
      throw std::invalid_argument("'" + text + "' is not a decimal number or p/q");
    return x;
  };
  if (slash == std::string::npos) return parse_double(text);
  auto parse_int = [&](const std::string& s) {
    std::int64_t v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || s.empty())
      throw std::invalid_argument("'" + text + "': p/q needs integers p and q");
    return v;
  };
  const std::int64_t p = parse_int(text.substr(0, slash));
  const std::int64_t q = parse_int(text.substr(slash + 1));
  if (q == 0) throw std::invalid_argument("'" + text + "': zero denominator");
  return static_cast<double>(p) / static_cast<double>(q);
}

AngleSpec parse_angle_over_pi(const std::string& text, bool declared_irrational) {
  const auto slash = text.find('/');
  std::int64_t p = 0, q = 1;
  auto parse_int = [](const std::string& s, std::int64_t& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e && !s.empty();
  };
  if (!declared_irrational) {
    if (slash == std::string::npos) {
      if (parse_int(text, p)) return AngleSpec::rational_pi(p, 1);
    } else if (parse_int(text.substr(0, slash), p) && parse_int(text.substr(slash + 1), q) && q != 0) {
      return AngleSpec::rational_pi(p, q);
    }
  }
  return AngleSpec::from_radians(parse_decimal(text) * std::numbers::pi, declared_irrational);
}

TextMatrix parse_inline_matrix(const std::string& text) {
  TextMatrix m;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto semi = text.find(';', start);
    const std::string row = text.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
    std::vector<std::string> entries;
    std::size_t s = 0;
    while (s <= row.size()) {
      const auto comma = row.find(',', s);
      std::string e = row.substr(s, comma == std::string::npos ? std::string::npos : comma - s);
      const auto b = e.find_first_not_of(' ');
      const auto en = e.find_last_not_of(' ');
      e = b == std::string::npos ? "" : e.substr(b, en - b + 1);
      (void)parse_decimal(e);
      entries.push_back(e);
      if (comma == std::string::npos) break;
      s = comma + 1;
    }
    m.push_back(std::move(entries));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  for (const auto& r : m)
    if (r.size() != m.size()) throw std::invalid_argument("matrix '" + text + "' is not square");
  return m;
}

Matrix to_matrix(const TextMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Matrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(m[static_cast<std::size_t>(r)].size()) != n)
      throw std::invalid_argument("matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c)
      out(r, c) = parse_decimal(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  }
  return out;
}

json angle_to_json(const AngleSpec& a) {
  if (a.is_rational()) return json{{"rational_pi", {a.rational().p, a.rational().q}}};
  return json{{"radians", a.floating().radians}, {"declared_irrational", a.floating().declared_irrational}};
}

AngleSpec angle_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected angle object, got " + type_name(j));
  if (j.contains("rational_pi")) {
    check_keys(j, path, {"rational_pi"});
    const json& r = j.at("rational_pi");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
      fail(path + ".rational_pi", "expected [p, q] with integers p and q");
    const auto q = r[1].get<std::int64_t>();
    if (q <= 0) fail(path + ".rational_pi[1]", "q must be a positive integer");
    return AngleSpec::rational_pi(r[0].get<std::int64_t>(), q);
  }
  if (j.contains("radians")) {
    check_keys(j, path, {"radians", "declared_irrational"});
    const double x = get_real(j, "radians", path, 0.0);
    if (!std::isfinite(x)) fail(path + ".radians", "must be finite");
    bool irr = false;
    if (j.contains("declared_irrational")) {
      if (!j.at("declared_irrational").is_boolean()) fail(path + ".declared_irrational", "expected boolean");
      irr = j.at("declared_irrational").get<bool>();
    }
    return AngleSpec::from_radians(x, irr);
  }
  fail(path, "angle needs 'rational_pi' or 'radians'");
}

MatrixSet build_set(const SetSpec& spec) {
  switch (spec.kind) {
    case SetSpec::Kind::Matrices: {
      std::vector<Matrix> mats;
      for (const auto& m : spec.matrices) mats.push_back(to_matrix(m));
      MatrixSet set(std::move(mats), spec.labels);
      for (std::size_t i = 0; i < spec.angles.size(); ++i)
        if (spec.angles[i]) set = set.with_rotation_angle(i, *spec.angles[i]);
      return set;
    }
    case SetSpec::Kind::Example1:
      return example1(*spec.theta);
    case SetSpec::Kind::Example2:
      return example2_truncation(spec.max_n);
    case SetSpec::Kind::Projections:
      return projection_family(spec.projection_angles);
    case SetSpec::Kind::Theorem2: {
      MatrixSet set({to_matrix(spec.b1), to_matrix(spec.b2)}, {"B1", "B2"});
      if (spec.b2_angle) set = set.with_rotation_angle(1, *spec.b2_angle);
      return set;
    }
  }
  throw std::logic_error("unknown set kind");
}

RunConfig config_from_json(const json& j) {
  require_object(j, "$");
  check_keys(j, "$", {"version", "command", "recipe", "set", "jsr", "norm", "sample", "transitivity", "family"});
  if (!j.contains("version")) fail("$.version", "required field missing (expected \"config-v1\")");
  if (j.at("version") != "config-v1") fail("$.version", "expected \"config-v1\", got " + j.at("version").dump());

  RunConfig c;
  c.command = get_string(j, "command", "$", "", {"jsr", "norm", "unique", "semigroup", "perturb", "reproduce"});
  if (c.command.empty()) fail("$.command", "required field missing");
  if (c.command == "reproduce") {
    c.recipe = get_string(j, "recipe", "$", "", {"example1", "example2", "theorem2"});
    if (c.recipe.empty()) fail("$.recipe", "required for command 'reproduce'");
  } else if (j.contains("recipe")) {
    fail("$.recipe", "only valid with command 'reproduce'");
  }
  if (!j.contains("set")) fail("$.set", "required field missing");
  c.set = set_from_json(j.at("set"), "$.set");

  if (j.contains("jsr")) {
    const json& s = require_object(j.at("jsr"), "$.jsr");
    check_keys(s, "$.jsr", {"depth", "prune_ratio", "rel_tol"});
    c.depth = get_count(s, "depth", "$.jsr", c.depth, 1);
    c.prune_ratio = get_positive(s, "prune_ratio", "$.jsr", c.prune_ratio);
    if (c.prune_ratio > 1.0) fail("$.jsr.prune_ratio", "must lie in (0, 1]");
    c.jsr_rel_tol = get_positive(s, "rel_tol", "$.jsr", c.jsr_rel_tol);
  }
  if (j.contains("norm")) {
    const json& s = require_object(j.at("norm"), "$.norm");
    check_keys(s, "$.norm", {"horizon", "grid", "seed_norm", "rho_hat"});
    c.horizon = get_count(s, "horizon", "$.norm", c.horizon);
    c.grid = get_count(s, "grid", "$.norm", c.grid, 16);
    if (c.grid % 2 != 0) fail("$.norm.grid", "must be even");
    c.seed_norm = get_string(s, "seed_norm", "$.norm", c.seed_norm, {"euclidean", "sup"});
    if (s.contains("rho_hat") && !s.at("rho_hat").is_null()) c.rho_hat = get_positive(s, "rho_hat", "$.norm", 1.0);
  }
  if (j.contains("sample")) {
    const json& s = require_object(j.at("sample"), "$.sample");
    check_keys(s, "$.sample", {"min_length", "max_length", "power_length", "keep_threshold", "dedupe_tol"});
    c.min_length = get_count(s, "min_length", "$.sample", c.min_length, 1);
    c.max_length = get_count(s, "max_length", "$.sample", c.max_length, 1);
    if (c.min_length > c.max_length) fail("$.sample.min_length", "must not exceed max_length");
    c.power_length = get_count(s, "power_length", "$.sample", c.power_length);
    if (c.power_length > 65536) fail("$.sample.power_length", "must be <= 65536");
    c.keep_threshold = get_positive(s, "keep_threshold", "$.sample", c.keep_threshold);
    c.dedupe_tol = get_positive(s, "dedupe_tol", "$.sample", c.dedupe_tol);
  }
  if (j.contains("transitivity")) {
    const json& s = require_object(j.at("transitivity"), "$.transitivity");
    check_keys(s, "$.transitivity", {"pairs", "tol", "seed", "escalate"});
    c.pairs = get_count(s, "pairs", "$.transitivity", c.pairs, 1);
    c.tol = get_positive(s, "tol", "$.transitivity", c.tol);
    c.seed = get_count(s, "seed", "$.transitivity", c.seed);
    if (s.contains("escalate")) {
      if (!s.at("escalate").is_boolean()) fail("$.transitivity.escalate", "expected boolean");
      c.escalate = s.at("escalate").get<bool>();
    }
  }
  if (j.contains("family")) {
    const json& s = require_object(j.at("family"), "$.family");
    check_keys(s, "$.family", {"count", "min_distance", "residual_tol", "companion", "kappas"});
    c.count = get_count(s, "count", "$.family", c.count, 1);
    c.min_distance = get_positive(s, "min_distance", "$.family", c.min_distance);
    c.residual_tol = get_positive(s, "residual_tol", "$.family", c.residual_tol);
    c.companion = get_string(s, "companion", "$.family", c.companion, {"square", "hexagon"});
    if (s.contains("kappas")) {
      const json& ks = s.at("kappas");
      if (!ks.is_array()) fail("$.family.kappas", "expected array of numbers");
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const std::string p = "$.family.kappas[" + std::to_string(i) + "]";
        if (!ks[i].is_number() || !(ks[i].get<double>() > 0.0)) fail(p, "expected positive number");
        c.kappas.push_back(ks[i].get<double>());
      }
    }
  }

  // The set must be buildable; surface its validation errors with the path.
  try {
    (void)build_set(c.set);
  } catch (const std::exception& e) {
    fail("$.set", e.what());
  }
  if (c.command == "reproduce") {
    const std::string want = c.recipe;
    if (to_string(c.set.kind) != want)
      fail("$.set.kind", "recipe '" + want + "' needs a set of kind '" + want + "'");
  }
  if (c.command == "perturb" && c.set.kind != SetSpec::Kind::Theorem2)
    fail("$.set.kind", "command 'perturb' needs a set of kind 'theorem2'");
  return c;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(json_text, e.byte);
    throw ConfigError("config: line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": invalid JSON");
  }
  return config_from_json(j);
}

json to_json(const SetSpec& s) {
  json j{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case SetSpec::Kind::Matrices: {
      json ms = json::array();
      for (const auto& m : s.matrices) ms.push_back(matrix_to_json_text(m));
      j["matrices"] = ms;
      if (!s.labels.empty()) j["labels"] = s.labels;
      json as = json::array();
      bool any = false;
      for (const auto& a : s.angles) {
        as.push_back(a ? angle_to_json(*a) : json(nullptr));
        any = any || a.has_value();
      }
      if (any) j["angles"] = as;
      break;
    }
    case SetSpec::Kind::Example1:
      j["theta"] = angle_to_json(*s.theta);
      break;
    case SetSpec::Kind::Example2:
      j["max_n"] = s.max_n;
      break;
    case SetSpec::Kind::Projections: {
      json as = json::array();
      for (const auto& a : s.projection_angles) as.push_back(angle_to_json(a));
      j["angles"] = as;
      break;
    }
    case SetSpec::Kind::Theorem2:
      j["b1"] = matrix_to_json_text(s.b1);
      j["b2"] = matrix_to_json_text(s.b2);
      if (s.b2_angle) j["b2_angle"] = angle_to_json(*s.b2_angle);
      break;
  }
  return j;
}

json to_json(const RunConfig& c) {
  json j{{"version", "config-v1"}, {"command", c.command}};
  if (!c.recipe.empty()) j["recipe"] = c.recipe;
  j["set"] = to_json(c.set);
  j["jsr"] = {{"depth", c.depth}, {"prune_ratio", c.prune_ratio}, {"rel_tol", c.jsr_rel_tol}};
  j["norm"] = {{"horizon", c.horizon}, {"grid", c.grid}, {"seed_norm", c.seed_norm},
               {"rho_hat", c.rho_hat ? json(*c.rho_hat) : json(nullptr)}};
  j["sample"] = {{"min_length", c.min_length},         {"max_length", c.max_length},
                 {"power_length", c.power_length},     {"keep_threshold", c.keep_threshold},
                 {"dedupe_tol", c.dedupe_tol}};
  j["transitivity"] = {{"pairs", c.pairs}, {"tol", c.tol}, {"seed", c.seed}, {"escalate", c.escalate}};
  j["family"] = {{"count", c.count},
                 {"min_distance", c.min_distance},
                 {"residual_tol", c.residual_tol},
                 {"companion", c.companion},
                 {"kappas", c.kappas}};
  return j;
}

}  // namespace barabanov
