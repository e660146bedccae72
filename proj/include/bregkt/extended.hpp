#pragma once

#include <cmath>
#include <limits>

#include "bregkt/errors.hpp"

namespace bregkt {

/// Value in (-inf, +inf].  The +inf state is an explicit tag, not a sentinel
/// float, so "the distance is infinite" is a testable outcome rather than an
/// artifact of IEEE arithmetic.
class ExtendedReal {
public:
  constexpr ExtendedReal() : v_(0.0), finite_(true) {}
  constexpr ExtendedReal(double v) : v_(v), finite_(true) {}

  static constexpr ExtendedReal infinity() { return ExtendedReal(0.0, false); }

  /// Tags an IEEE double: finite values stay finite, +inf becomes the
  /// infinite tag.  NaN and -inf are rejected (they never arise from convex
  /// values bounded below).
  static ExtendedReal from_ieee(double v) {
    if (std::isfinite(v)) return ExtendedReal(v);
    if (std::isinf(v) && v > 0) return infinity();
    throw Error("ExtendedReal: NaN or -inf cannot be represented");
  }

  constexpr bool is_finite() const { return finite_; }
  constexpr bool is_infinite() const { return !finite_; }

  /// Finite value; calling this on the infinite tag is a logic error.
  double value() const {
    if (!finite_) throw Error("ExtendedReal: value() on +inf");
    return v_;
  }

  /// Finite value, or +inf as an IEEE double (for printing/comparisons).
  constexpr double ieee() const {
    return finite_ ? v_ : std::numeric_limits<double>::infinity();
  }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (!a.finite_ || !b.finite_) return infinity();
    return ExtendedReal(a.v_ + b.v_);
  }

  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.v_ == b.v_;
  }

  /// Order with +inf greater than every finite value.
  friend constexpr bool operator<(ExtendedReal a, ExtendedReal b) {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.v_ < b.v_;
  }
  friend constexpr bool operator<=(ExtendedReal a, ExtendedReal b) {
    return a < b || a == b;
  }

private:
  constexpr ExtendedReal(double v, bool finite) : v_(v), finite_(finite) {}

  double v_;
  bool finite_;
};

/// Bregman distances are nonnegative extended reals; +inf exactly when the
/// second argument leaves the interior domain (or the first leaves the
/// closed domain).
using BregmanValue = ExtendedReal;

} // namespace bregkt
