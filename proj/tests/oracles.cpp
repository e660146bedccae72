#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace testor {

using bregkt::ScalarPhi;
using bregkt::Vec;
namespace sk = bregkt::scalar_kernel;

double lambert_w_bisect(double t) {
  if (!(t >= 0.0)) throw std::runtime_error("lambert_w_bisect: t < 0");
  if (t == 0.0) return 0.0;
  const auto f = [&](double w) { return w * std::exp(w) - t; };
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double bisect_increasing(double dlo, double dhi,
                         const std::function<double(double)>& g) {
  // Geometric walk toward each open endpoint to find a sign change.
  double seed;
  if (std::isfinite(dlo) && std::isfinite(dhi))
    seed = 0.5 * (dlo + dhi);
  else if (std::isfinite(dlo))
    seed = dlo + 1.0;
  else if (std::isfinite(dhi))
    seed = dhi - 1.0;
  else
    seed = 0.0;

  double lo = seed, hi = seed;
  bool have_lo = g(lo) <= 0.0, have_hi = g(hi) >= 0.0;
  for (int k = 1; k <= 400 && !(have_lo && have_hi); ++k) {
    if (!have_hi) {
      hi = std::isfinite(dhi) ? dhi - (dhi - seed) * std::ldexp(1.0, -k)
                              : seed + std::ldexp(1.0, k) - 1.0;
      const double v = g(hi);
      if (!std::isnan(v)) have_hi = v >= 0.0;
    }
    if (!have_lo) {
      lo = std::isfinite(dlo) ? dlo + (seed - dlo) * std::ldexp(1.0, -k)
                              : seed - std::ldexp(1.0, k) + 1.0;
      const double v = g(lo);
      if (!std::isnan(v)) have_lo = v <= 0.0;
    }
  }
  if (!(have_lo && have_hi))
    throw std::runtime_error("bisect_increasing: no bracket");

  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double v = g(mid);
    if (v > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double scalar_resolvent_bisect(bregkt::KernelKind hk, double hp,
                               const ScalarPhi& phi, double gamma, double r) {
  const auto hd = sk::interior_interval(hk);
  const auto pd = phi.domain();
  return bisect_increasing(std::max(hd.lo, pd.lo), std::min(hd.hi, pd.hi),
                           [&](double a) {
                             return sk::grad(hk, hp, a) +
                                    gamma * phi.deriv(a) - r;
                           });
}

namespace {

double vdot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_zero(const Vec& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

} // namespace

Vec qp_two_halfspaces(const Vec& x0, const Vec& n1, double o1, const Vec& n2,
                      double o2) {
  const bool has1 = !all_zero(n1);
  const bool has2 = !all_zero(n2);
  const double slack1 = 1e-9 * (1.0 + std::fabs(o1));
  const double slack2 = 1e-9 * (1.0 + std::fabs(o2));
  const auto feas = [&](const Vec& p) {
    const bool f1 = !has1 || vdot(p, n1) - o1 <= slack1;
    const bool f2 = !has2 || vdot(p, n2) - o2 <= slack2;
    return f1 && f2;
  };
  const auto shifted = [&](double l1, double l2) {
    Vec p(x0.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = x0[i] - l1 * n1[i] - l2 * n2[i];
    return p;
  };

  Vec best;
  double best_d = std::numeric_limits<double>::infinity();
  const auto consider = [&](const Vec& p) {
    if (!feas(p)) return;
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      d += (p[i] - x0[i]) * (p[i] - x0[i]);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  };

  consider(x0);
  if (has1) {
    const double lam = (vdot(x0, n1) - o1) / vdot(n1, n1);
    if (lam >= 0.0) consider(shifted(lam, 0.0));
  }
  if (has2) {
    const double lam = (vdot(x0, n2) - o2) / vdot(n2, n2);
    if (lam >= 0.0) consider(shifted(0.0, lam));
  }
  if (has1 && has2) {
    const double g11 = vdot(n1, n1), g12 = vdot(n1, n2), g22 = vdot(n2, n2);
    const double det = g11 * g22 - g12 * g12;
    if (std::fabs(det) > 1e-14 * g11 * g22) {
      const double r1 = vdot(x0, n1) - o1, r2 = vdot(x0, n2) - o2;
      const double l1 = (g22 * r1 - g12 * r2) / det;
      const double l2 = (g11 * r2 - g12 * r1) / det;
      if (l1 >= 0.0 && l2 >= 0.0) consider(shifted(l1, l2));
    }
  }
  if (!std::isfinite(best_d))
    throw std::runtime_error("qp_two_halfspaces: empty intersection");
  return best;
}

} // namespace testor
