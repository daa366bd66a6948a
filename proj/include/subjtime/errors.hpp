#pragma once

#include <stdexcept>
#include <string>

namespace subjtime {

/// Raised when a caller violates a documented precondition (bad parameter,
/// malformed grid, out-of-range evaluation point).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gamma evaluated at a pole; use reciprocal_gamma instead.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical procedure could not reach its requested tolerance within its
/// budget (series terms, quadrature panels, frequency window, ...).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The decay window supplied for an input signal does not bound it.
class TailTruncationError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

}  // namespace subjtime
