#pragma once

#include <stdexcept>
#include <string>

namespace barabanov {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The input set has a common invariant subspace (or irreducibility could not
/// be established), so the existence hypothesis for Barabanov norms fails.
class ReducibleInputError : public Error {
 public:
  using Error::Error;
};

/// Geometry that cannot define a norm: zero area, origin on the boundary,
/// non-convex or non-symmetric vertex lists.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A pair (B1, B2) outside the open set where the perturbation construction
/// applies.
class NotInPerturbationSetError : public Error {
 public:
  using Error::Error;
};

/// A construction ran but its output failed numerical certification.
class CertificationError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration. The message names the offending field path
/// (e.g. $.set.matrices[0][1][0]) or the line and column of a parse error.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace barabanov
