#pragma once

#include <stdexcept>
#include <string>

namespace meanvort {

/// Base class for all solver-level failures (mapped to exit code 3 by the CLI).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative elliptic solve hit its iteration cap with residual above target.
/// Usually signals extreme coefficient contrast; raise max_iter or smooth b.
class NonConvergence : public SolverError {
 public:
  NonConvergence(int iters, double residual, double tol)
      : SolverError("elliptic solve did not converge: " + std::to_string(iters) +
                    " iterations, residual " + std::to_string(residual) +
                    " > tol " + std::to_string(tol)),
        iters(iters),
        residual(residual) {}
  int iters;
  double residual;
};

/// Time step exceeds the CFL bound for the current flux velocity.
class CflViolation : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Picard iteration diverged (sup-differences increased for 3 consecutive iterates).
class Divergence : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Characteristic-curve horizon too short for the requested quadrature window.
class OutOfRange : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Bisection bracket invalid; signals an upstream integration error.
class BracketFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Operation requested outside the parameter regime it is defined for.
class RegimeMismatch : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Too few stored snapshots for a finite-difference-in-time diagnostic.
class InsufficientSnapshots : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Base class for configuration problems (mapped to exit code 2 by the CLI).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Snapshot/CSV file problems.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace meanvort
