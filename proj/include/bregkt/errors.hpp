#pragma once

#include <stdexcept>
#include <string>

namespace bregkt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix dimensions do not agree.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A point lies outside the (interior) domain required by the operation,
/// e.g. a gradient evaluated on the domain boundary.
class DomainError : public Error {
public:
  using Error::Error;
};

/// No evaluation rule is registered for the requested
/// (operator kind, kernel kind, step size) combination and no smooth
/// fallback applies.
class DispatchError : public Error {
public:
  using Error::Error;
};

/// A scalar root search failed: no sign change could be bracketed or the
/// safeguarded Newton iteration hit its budget.  For half-space projections
/// this signals that the half-space does not meet the interior of the
/// kernel domain numerically.
class RootFindError : public Error {
public:
  using Error::Error;
};

/// The two-half-space projection found no KKT-consistent active set; the
/// outer loop's feasibility contract was violated (typically by
/// floating-point drift).
class InfeasibleError : public Error {
public:
  using Error::Error;
};

/// A problem violates a construction invariant (e.g. start point on the
/// domain boundary, step-size schedule outside its box).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A problem file does not match the documented schema; the message carries
/// the JSON field path.
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace bregkt
