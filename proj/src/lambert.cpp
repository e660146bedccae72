#include "bregkt/lambert.hpp"

#include <algorithm>
#include <cmath>

#include "bregkt/errors.hpp"

namespace bregkt {

namespace {

double residual_target(double t) { return 1e-13 * std::max(t, 1.0); }

/// Bisection fallback on [0, log1p(t)]: g(w) = w e^w - t has g(0) = -t <= 0
/// and g(log1p(t)) = log1p(t)*(1+t) - t >= 0 since log1p(t) >= t/(1+t).
double bisect_w(double t) {
  double lo = 0.0, hi = std::log1p(t);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = mid * std::exp(mid) - t;
    if (std::fabs(g) <= residual_target(t)) return mid;
    (g > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

WResult lambert_w(double t) {
  if (!(t >= 0.0)) throw DomainError("lambert_w: argument must be >= 0");
  if (t == 0.0) return {0.0};

  // log1p(t) bounds the root from above and is already close to it; Halley
  // steps contract fast from there.
  double w = std::log1p(t);
  for (int i = 0; i < 50; ++i) {
    const double ew = std::exp(w);
    const double g = w * ew - t;
    if (std::fabs(g) <= residual_target(t)) return {w};
    const double gp = ew * (w + 1.0);
    const double step = g / (gp - (w + 2.0) * g / (2.0 * (w + 1.0)));
    double next = w - step;
    if (!(next >= 0.0) || !std::isfinite(next)) next = 0.5 * w;
    w = next;
  }
  return {bisect_w(t)};
}

double lambert_w_log(double s) {
  if (s <= 700.0) return lambert_w(std::exp(s)).w;
  // w e^w = e^s with w > 1: solve w + log(w) = s by Newton; the iteration
  // map has derivative w/(w+1) ~ 1, so a handful of steps suffice.
  double w = s - std::log(s);
  for (int i = 0; i < 50; ++i) {
    const double g = w + std::log(w) - s;
    if (std::fabs(g) <= 1e-15 * s) break;
    w -= g * w / (w + 1.0);
  }
  return w;
}

} // namespace bregkt
