#pragma once

#include <cstdint>
#include <vector>

#include "bregkt/geometry.hpp"
#include "bregkt/kernels.hpp"
#include "bregkt/solver.hpp"
#include "bregkt/vec.hpp"

namespace bregkt {

/// Reference description of the target set
///   Z = {(x, y*) : -L*y* in Ax  and  Lx in B^{-1}y*}
/// for single-valued affine A and B, where it is the solution set of a
/// linear system:
///  - Empty: the system is inconsistent;
///  - Singleton: unique solution `point`;
///  - AffineFamily: point + span(basis);
///  - Polyhedron: point + span(basis) cut by `inequalities` (used by tests
///    that add explicit half-space constraints; never produced by
///    kt_set_affine itself).
struct KTDescription {
  enum class Kind { Empty, Singleton, AffineFamily, Polyhedron };
  Kind kind = Kind::Empty;
  PrimalDualPoint point;
  std::vector<PrimalDualPoint> basis;
  std::vector<HalfSpace> inequalities;
};

/// Computes Z directly for problems whose A and B expose an affine form
/// (x -> M_A x + q_A, y -> M_B y + q_B): eliminating y* = M_B L x + q_B
/// turns membership into (M_A + L^T M_B L) x = -q_A - L^T q_B, solved
/// densely with full pivoting; a singular but consistent system yields an
/// affine family via the null-space basis.  Throws DispatchError when an
/// operator has no affine form.
KTDescription kt_set_affine(const CompositeProblem& problem);

/// ||M_A x + q_A + L* y*|| + ||M_B L x + q_B - y*||: zero exactly on Z.
double kt_membership_residual(const CompositeProblem& problem,
                              const PrimalDualPoint& z);

/// Minimizes D^F(z, start) over the described set by brute force:
/// a damped Newton method on the affine parametrization (projected
/// gradient with an exact active-set projection when inequalities are
/// present), run from t = 0 plus `restarts` random starts, keeping the
/// best result with first-order residual <= 1e-9.  Throws ValidationError
/// on an empty description, RootFindError if no start converges.
PrimalDualPoint best_approx_bruteforce(const ProductKernel& F,
                                       const KTDescription& Z,
                                       const PrimalDualPoint& start,
                                       std::uint64_t seed = 1234,
                                       int restarts = 10);

} // namespace bregkt
