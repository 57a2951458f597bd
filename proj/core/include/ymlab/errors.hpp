#pragma once

#include <stdexcept>
#include <string>

namespace ymlab {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Principal logarithm hit an eigenvalue within tolerance of angle pi.
struct BranchAmbiguity : Error {
  using Error::Error;
};

// Relator defect of a representation exceeds the admission tolerance.
struct NotCentral : Error {
  using Error::Error;
};

// The symplectic cochain pairing is rank-deficient on C^1.
struct DegenerateSigma : Error {
  double rank_ratio = 0.0;
  DegenerateSigma(const std::string& msg, double ratio) : Error(msg), rank_ratio(ratio) {}
};

// Iterative solver failed to contract / reach its target.
struct NoConvergence : Error {
  using Error::Error;
};

struct NotACocycle : Error {
  using Error::Error;
};

// Input violates the slice-variety membership residual.
struct NotInSliceVariety : Error {
  using Error::Error;
};

struct NotInChart : Error {
  using Error::Error;
};

// Requested representation cannot exist (e.g. abelian group, nontrivial target).
struct Infeasible : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace ymlab
