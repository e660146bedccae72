#pragma once

namespace bregkt {

/// Principal Lambert W value, the unique w >= 0 with w*exp(w) = t.
struct WResult {
  double w;
};

/// Principal branch on t >= 0: returns w >= 0 with |w e^w - t| <= 1e-13 * max(t, 1).
/// Throws DomainError for t < 0 (only the nonnegative branch is needed: every
/// argument arising from the resolvent formulas has the form gamma*c*e^s with
/// gamma, c > 0).
WResult lambert_w(double t);

/// W(exp(s)) evaluated robustly even when exp(s) would overflow a double.
/// For s <= 700 this is lambert_w(exp(s)); beyond that it solves
/// w + log(w) = s directly (w > 1 there, so the form is well conditioned).
double lambert_w_log(double s);

} // namespace bregkt
