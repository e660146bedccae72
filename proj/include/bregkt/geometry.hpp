#pragma once

#include "bregkt/kernels.hpp"
#include "bregkt/vec.hpp"

namespace bregkt {

/// Closed half-space {z : <z, normal> <= offset} in the primal-dual product
/// space.  A zero normal with offset >= 0 degenerates to the whole space.
struct HalfSpace {
  PrimalDualPoint normal;
  double offset = 0.0;

  /// <z, normal> - offset (positive outside the half-space).
  double violation(const PrimalDualPoint& z) const {
    return dot(z, normal) - offset;
  }
  bool contains(const PrimalDualPoint& z, double slack = 0.0) const {
    return violation(z) <= slack;
  }
  /// True when the normal vanishes, i.e. the constraint is vacuous.
  bool is_whole_space(double norm_tol = 0.0) const {
    return norm2(normal) <= norm_tol;
  }
};

/// The half-space D(x, y) = {z : <z - y, grad F(x) - grad F(y)> <= 0} that
/// separates y from x; it contains every point at least as F-close to x as
/// y is.  Degenerates to the whole space when x == y.
HalfSpace separating_halfspace(const ProductKernel& F, const PrimalDualPoint& x,
                               const PrimalDualPoint& y);

/// A Bregman projection together with the Lagrange multipliers of the
/// half-space constraints that ended up active.
struct ProjectionResult {
  PrimalDualPoint point;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool active1 = false;
  bool active2 = false;
};

/// Bregman projection of an interior point z onto the half-space hs with
/// respect to the product kernel F.
///
/// If z already satisfies the constraint the projection is z itself with a
/// zero multiplier.  Otherwise the projection is
///     p(lambda) = grad F*(grad F(z) - lambda * normal)
/// with the unique lambda > 0 solving <p(lambda), normal> = offset; the map
/// lambda -> <p(lambda), normal> is strictly decreasing, so the root is
/// bracketed by doubling and polished with a bisection-safeguarded Newton
/// iteration (derivative from the diagonal Jacobian of grad F*).  Stops when
/// the constraint residual is <= 1e-12 * (1 + |offset|).
///
/// Throws DomainError when z is not interior, RootFindError when the
/// half-space cannot be reached from z (it misses the closure of dom F).
ProjectionResult project_halfspace(const ProductKernel& F,
                                   const PrimalDualPoint& z,
                                   const HalfSpace& hs);

/// Bregman projection of x0 onto D(x0, x) intersect D(x, y): the composite
/// step that pulls the new iterate back toward the start while staying on
/// the far side of the freshly cut half-space.
///
/// Solved by active-set enumeration over the two constraints in the order
/// {}, {1}, {2}, {1,2}; the first candidate with nonnegative multipliers
/// that satisfies both constraints (slack 1e-10 * (1 + |offset|)) wins; a
/// degenerate constraint (x == x0 or y == x) participates as "always
/// satisfied".  The doubly-active case runs a damped Newton method on the
/// multiplier pair, using the symmetric negative-definite Jacobian
/// J_jk = -sum_i cgd_i n_j,i n_k,i.
///
/// Throws InfeasibleError when no candidate passes, which contradicts the
/// invariant that the target set lies in both half-spaces; reaching it
/// means the caller's problem data violated a precondition.
ProjectionResult q_projection(const ProductKernel& F, const PrimalDualPoint& x0,
                              const PrimalDualPoint& x,
                              const PrimalDualPoint& y);

} // namespace bregkt
