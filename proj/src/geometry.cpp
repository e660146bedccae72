#include "bregkt/geometry.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "bregkt/errors.hpp"
#include "bregkt/parallel.hpp"

namespace bregkt {

namespace {

/// Scale of the evaluation <p, n> - o: the sum of the magnitudes entering
/// the inner product.  Violations and residuals are judged against this
/// scale; an absolute floor would absorb genuinely positive violations of
/// small-normal constraints and stall the outer iteration.
double constraint_scale(const PrimalDualPoint& p, const HalfSpace& hs) {
  double m = std::fabs(hs.offset);
  for (std::size_t i = 0; i < p.x.size(); ++i)
    m += std::fabs(p.x[i] * hs.normal.x[i]);
  for (std::size_t i = 0; i < p.ystar.size(); ++i)
    m += std::fabs(p.ystar[i] * hs.normal.ystar[i]);
  return m;
}

double feasibility_slack(const PrimalDualPoint& p, const HalfSpace& hs) {
  return 1e-10 * constraint_scale(p, hs);
}

double residual_target(const PrimalDualPoint& p, const HalfSpace& hs) {
  return 1e-12 * constraint_scale(p, hs);
}

/// sum_i w_i a_i b_i over both blocks (diagonal-weighted inner product).
double wdot(const PrimalDualPoint& w, const PrimalDualPoint& a,
            const PrimalDualPoint& b) {
  const double px = par::sum(w.x.size(), [&](std::size_t i) {
    return w.x[i] * a.x[i] * b.x[i];
  });
  const double py = par::sum(w.ystar.size(), [&](std::size_t i) {
    return w.ystar[i] * a.ystar[i] * b.ystar[i];
  });
  return px + py;
}

struct BoundaryPoint {
  PrimalDualPoint p;
  double lambda;
};

/// Solves <grad F*(g0 - lambda n), n> = offset for lambda > 0, assuming the
/// value at lambda = 0 exceeds offset (strict violation) and that the map is
/// strictly decreasing.  Returns nullopt when no finite lambda reaches the
/// boundary (the half-space misses the reachable part of dom F).
std::optional<BoundaryPoint> solve_boundary(const ProductKernel& F,
                                            const PrimalDualPoint& g0,
                                            const HalfSpace& hs) {
  const auto eval_p = [&](double lambda) {
    return F.conjugate_gradient(axpy(g0, -lambda, hs.normal));
  };
  const auto zeta_of = [&](const PrimalDualPoint& p) {
    return dot(p, hs.normal) - hs.offset;
  };

  // Bracket by doubling: zeta(0) > 0 by precondition, find lambda with
  // zeta <= 0.
  double lo = 0.0, hi = 1.0;
  double zhi;
  for (;;) {
    zhi = zeta_of(eval_p(hi));
    if (std::isnan(zhi)) return std::nullopt;
    if (zhi <= 0.0) break;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::nullopt;
  }

  double lambda = zhi == 0.0 ? hi : 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const PrimalDualPoint s = axpy(g0, -lambda, hs.normal);
    const PrimalDualPoint p = F.conjugate_gradient(s);
    const double zeta = zeta_of(p);
    if (std::fabs(zeta) <= residual_target(p, hs))
      return BoundaryPoint{p, lambda};
    if (zeta > 0.0)
      lo = lambda;
    else
      hi = lambda;
    const PrimalDualPoint cgd = F.conjugate_gradient_derivative(s);
    const double dzeta = -wdot(cgd, hs.normal, hs.normal);
    double next = lambda - zeta / dzeta;
    if (!std::isfinite(next) || next <= lo || next >= hi)
      next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(hi, 1e-300)) {
      const PrimalDualPoint pb = eval_p(next);
      if (std::fabs(zeta_of(pb)) <= 1e-8 * constraint_scale(pb, hs))
        return BoundaryPoint{pb, next};
      return std::nullopt;
    }
    lambda = next;
  }
  return std::nullopt;
}

} // namespace

HalfSpace separating_halfspace(const ProductKernel& F, const PrimalDualPoint& x,
                               const PrimalDualPoint& y) {
  require_same_shape(x, y, "separating_halfspace");
  const PrimalDualPoint n = sub(F.gradient(x), F.gradient(y));
  const double offset = dot(y, n);
  return HalfSpace{n, offset};
}

ProjectionResult project_halfspace(const ProductKernel& F,
                                   const PrimalDualPoint& z,
                                   const HalfSpace& hs) {
  require_same_shape(z, hs.normal, "project_halfspace");
  if (!F.is_interior(z))
    throw DomainError("project_halfspace: point is not interior to dom F");
  if (hs.violation(z) <= 0.0) return {z, 0.0, 0.0, false, false};

  const auto hit = solve_boundary(F, F.gradient(z), hs);
  if (!hit)
    throw RootFindError(
        "project_halfspace: the half-space cannot be reached from the "
        "given point (no positive multiplier attains the boundary)");
  return {hit->p, hit->lambda, 0.0, true, false};
}

ProjectionResult q_projection(const ProductKernel& F, const PrimalDualPoint& x0,
                              const PrimalDualPoint& x,
                              const PrimalDualPoint& y) {
  const HalfSpace h1 = separating_halfspace(F, x0, x);
  const HalfSpace h2 = separating_halfspace(F, x, y);
  const bool deg1 = h1.is_whole_space();
  const bool deg2 = h2.is_whole_space();
  const auto ok1 = [&](const PrimalDualPoint& p) {
    return deg1 || h1.contains(p, feasibility_slack(p, h1));
  };
  const auto ok2 = [&](const PrimalDualPoint& p) {
    return deg2 || h2.contains(p, feasibility_slack(p, h2));
  };

  // Unconstrained candidate: the minimizer of F(p) - <p, grad F(x0)> is x0.
  if (ok1(x0) && ok2(x0)) return {x0, 0.0, 0.0, false, false};

  // Candidates that miss the strict feasibility slacks are kept anyway: once
  // the iteration reaches its rounding floor the two half-spaces become
  // nearly parallel, every candidate violates one of them by a rounding-scale
  // amount, and the least-violating candidate is still the right answer.
  std::vector<ProjectionResult> fallback;
  fallback.push_back({x0, 0.0, 0.0, false, false});

  const PrimalDualPoint g0 = F.gradient(x0);

  // Singly-active candidates.  The boundary solve needs a strict violation
  // at lambda = 0; when x0 already satisfies the constraint the active-set
  // guess is wrong and is skipped.
  if (!deg1 && h1.violation(x0) > 0.0) {
    if (const auto hit = solve_boundary(F, g0, h1)) {
      if (ok2(hit->p)) return {hit->p, hit->lambda, 0.0, true, false};
      fallback.push_back({hit->p, hit->lambda, 0.0, true, false});
    }
  }
  if (!deg2 && h2.violation(x0) > 0.0) {
    if (const auto hit = solve_boundary(F, g0, h2)) {
      if (ok1(hit->p)) return {hit->p, 0.0, hit->lambda, false, true};
      fallback.push_back({hit->p, 0.0, hit->lambda, false, true});
    }
  }

  // Doubly-active candidate: damped Newton on the multiplier pair.
  if (!deg1 && !deg2) {
    double l1 = 1.0, l2 = 1.0;
    const auto residual = [&](double a, double b, PrimalDualPoint& s) {
      s = axpy(axpy(g0, -a, h1.normal), -b, h2.normal);
      const PrimalDualPoint p = F.conjugate_gradient(s);
      return std::pair<double, double>{dot(p, h1.normal) - h1.offset,
                                       dot(p, h2.normal) - h2.offset};
    };
    PrimalDualPoint s;
    auto [g1, g2] = residual(l1, l2, s);
    for (int iter = 0; iter < 100; ++iter) {
      PrimalDualPoint p = F.conjugate_gradient(s);
      if (std::fabs(g1) <= residual_target(p, h1) &&
          std::fabs(g2) <= residual_target(p, h2)) {
        if (l1 >= 0.0 && l2 >= 0.0) return {std::move(p), l1, l2, true, true};
        break; // converged to a non-KKT stationary pair; no valid candidate
      }
      const PrimalDualPoint cgd = F.conjugate_gradient_derivative(s);
      const double j11 = -wdot(cgd, h1.normal, h1.normal);
      const double j12 = -wdot(cgd, h1.normal, h2.normal);
      const double j22 = -wdot(cgd, h2.normal, h2.normal);
      const double det = j11 * j22 - j12 * j12;
      if (!(std::fabs(det) > 1e-300)) break; // parallel normals: singular
      const double d1 = -(j22 * g1 - j12 * g2) / det;
      const double d2 = -(j11 * g2 - j12 * g1) / det;
      // Backtrack on the residual merit until it decreases.
      const double merit0 = std::fabs(g1) + std::fabs(g2);
      double t = 1.0;
      bool improved = false;
      for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
        PrimalDualPoint strial;
        const auto [t1, t2] = residual(l1 + t * d1, l2 + t * d2, strial);
        if (std::isnan(t1) || std::isnan(t2)) continue;
        if (std::fabs(t1) + std::fabs(t2) < merit0) {
          l1 += t * d1;
          l2 += t * d2;
          g1 = t1;
          g2 = t2;
          s = strial;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    // Keep the best multiplier pair the damped Newton reached; near-singular
    // corners stall before meeting the residual targets, yet the point is
    // often feasible to rounding accuracy.
    fallback.push_back({F.conjugate_gradient(s), std::max(l1, 0.0),
                        std::max(l2, 0.0), true, true});
  }

  // Salvage pass: accept the least-violating candidate when its worst
  // violation is of rounding scale.  The intersection provably contains the
  // Kuhn-Tucker set, so reaching this point at all means the candidates are
  // separated from feasibility only by accumulated floating-point error.
  const auto worst_violation = [&](const PrimalDualPoint& p) {
    const double tiny = std::numeric_limits<double>::min();
    double w = 0.0;
    if (!deg1) w = std::max(w, h1.violation(p) / (constraint_scale(p, h1) + tiny));
    if (!deg2) w = std::max(w, h2.violation(p) / (constraint_scale(p, h2) + tiny));
    return w;
  };
  const ProjectionResult* best = nullptr;
  double best_w = std::numeric_limits<double>::infinity();
  for (const auto& cand : fallback) {
    const double w = worst_violation(cand.point);
    if (w < best_w) {
      best_w = w;
      best = &cand;
    }
  }
  if (best != nullptr && best_w <= 1e-6) return *best;

  std::ostringstream oss;
  oss << "q_projection: no active-set candidate satisfied both half-spaces"
      << " (best normalized violation " << best_w << " across "
      << fallback.size() << " candidates); their intersection appears"
      << " unreachable, which violates the step's containment invariant";
  throw InfeasibleError(oss.str());
}

} // namespace bregkt
