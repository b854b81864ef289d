#pragma once

#include "barabanov/matset.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace barabanov {

/// Matrix entries as written by the user ("1/2", "0.25", "-3"). Kept as text
/// so configs round-trip exactly.
using TextMatrix = std::vector<std::vector<std::string>>;

/// Where the matrix set of a run comes from.
struct SetSpec {
  enum class Kind { Matrices, Example1, Example2, Projections, Theorem2 };
  Kind kind = Kind::Matrices;

  // Matrices
  std::vector<TextMatrix> matrices;
  std::vector<std::string> labels;
  std::vector<std::optional<AngleSpec>> angles;

  // Example1: {diag(1, 0), R(theta)}
  std::optional<AngleSpec> theta;
  // Example2: {I} and R(pi / 2^n), n <= max_n
  std::size_t max_n = 0;
  // Projections
  std::vector<AngleSpec> projection_angles;
  // Theorem2: {B1, B2}, B2 tagged with b2_angle when given
  TextMatrix b1;
  TextMatrix b2;
  std::optional<AngleSpec> b2_angle;
};

std::string to_string(SetSpec::Kind k);

struct RunConfig {
  /// jsr | norm | unique | semigroup | perturb | reproduce
  std::string command = "unique";
  /// reproduce only: example1 | example2 | theorem2
  std::string recipe;
  SetSpec set;

  std::size_t depth = 6;
  double prune_ratio = 0.999;
  double jsr_rel_tol = 1e-6;
  std::size_t horizon = 12;
  std::size_t grid = 720;
  std::string seed_norm = "euclidean";  ///< euclidean | sup
  /// Overrides the JSR-derived estimate when set (norm command).
  std::optional<double> rho_hat;

  std::size_t min_length = 1;
  std::size_t max_length = 10;
  std::size_t power_length = 4096;
  double keep_threshold = 0.5;
  double dedupe_tol = 1e-8;
  std::size_t pairs = 200;
  double tol = 1e-3;
  std::uint64_t seed = 1;
  /// On a failed transitivity check, retry with power_length x4 (up to 65536).
  bool escalate = true;

  std::size_t count = 3;
  double min_distance = 0.01;
  double residual_tol = 1e-9;
  std::string companion = "square";  ///< square | hexagon
  std::vector<double> kappas;        ///< empty: 1/4, 1/2, 3/4 of kappa_max

  /// Not echoed into reports.
  std::string out_dir = ".";
  bool timestamp = true;
};

/// "3", "-0.25", "1e-3" or "p/q" (integers p, q).
/// Throws std::invalid_argument on anything else.
double parse_decimal(const std::string& text);

/// "p/q" or "p" gives an exact multiple of pi; anything else is a decimal
/// multiple of pi stored as a float angle carrying `declared_irrational`.
AngleSpec parse_angle_over_pi(const std::string& text, bool declared_irrational = false);

/// "a,b;c,d" (rows separated by ';').
TextMatrix parse_inline_matrix(const std::string& text);
Matrix to_matrix(const TextMatrix& m);

/// {"rational_pi": [p, q]} or {"radians": x, "declared_irrational": bool}.
nlohmann::json angle_to_json(const AngleSpec& a);
AngleSpec angle_from_json(const nlohmann::json& j, const std::string& path = "$");

MatrixSet build_set(const SetSpec& spec);

/// Parses and validates a config-v1 document. Throws ConfigError whose
/// message carries line/column for syntax errors and the field path for
/// schema violations.
RunConfig parse_config(const std::string& json_text);
RunConfig config_from_json(const nlohmann::json& j);

/// Resolved config echo (config-v1, without out_dir and timestamp).
nlohmann::json to_json(const RunConfig& c);
nlohmann::json to_json(const SetSpec& s);

}  // namespace barabanov
