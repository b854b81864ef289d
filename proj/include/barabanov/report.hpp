#pragma once

#include "barabanov/baranorm.hpp"
#include "barabanov/constructions.hpp"
#include "barabanov/jsr.hpp"
#include "barabanov/semigroup.hpp"

#include <json.hpp>

namespace barabanov {

/// JSON number, or null for inf/nan.
nlohmann::json number(double x);
nlohmann::json to_json(const Matrix& m);  ///< row-major nested arrays
nlohmann::json to_json(const Vector& v);

nlohmann::json to_json(const JsrBounds& b);
nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const RotationSubgroup& r);
/// Sample summary; with `elements` every element with its word.
nlohmann::json to_json(const SemigroupSample& s, bool elements);
/// Witness matrices are quoted from the sample together with their words.
nlohmann::json to_json(const TransitivityReport& r, const SemigroupSample& s);
nlohmann::json to_json(const PerturbationPair& p);

/// Verdict body without the family files (the caller adds those).
nlohmann::json to_json(const UniquenessVerdict& v);

}  // namespace barabanov
