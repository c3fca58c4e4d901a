#pragma once

#include <stdexcept>
#include <string>

namespace bsl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Family or couple parameters outside their admissible domain.
struct InvalidParams : Error {
  using Error::Error;
};

/// A custom measure that only charges the do-nothing transition.
struct NoOpMeasure : Error {
  using Error::Error;
};

/// Requested truncation level does not carry any branch mass.
struct TruncationTooSmall : Error {
  using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance.
struct QuadratureFailure : Error {
  using Error::Error;
};

/// A numerically verified analytic bound failed beyond tolerance.
struct BoundViolation : Error {
  using Error::Error;
};

/// Two supposedly coupled runs produced different event logs.
struct CouplingMismatch : Error {
  using Error::Error;
};

/// Structural and swept evaluations of the exponent limit disagree.
struct Inconsistent : Error {
  using Error::Error;
};

/// Operation not defined for this family.
struct Unsupported : Error {
  using Error::Error;
};

/// Too few valid replicas to aggregate.
struct InsufficientData : Error {
  using Error::Error;
};

}  // namespace bsl
