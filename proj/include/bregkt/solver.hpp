#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bregkt/geometry.hpp"
#include "bregkt/kernels.hpp"
#include "bregkt/linear_map.hpp"
#include "bregkt/operators.hpp"
#include "bregkt/vec.hpp"

namespace bregkt {

/// Produces the step sizes (gamma_n, mu_n) for each iteration.  The solver
/// checks every emitted pair against the problem's [epsilon, sigma] x
/// [delta, sigma] box before starting.
class StepSchedule {
public:
  static StepSchedule constant(double gamma = 1.0, double mu = 1.0);
  /// gamma_n = gammas[n mod |gammas|], mu_n = mus[n mod |mus|].
  static StepSchedule cyclic(std::vector<double> gammas, std::vector<double> mus);

  std::pair<double, double> at(std::size_t n) const {
    return {gammas_[n % gammas_.size()], mus_[n % mus_.size()]};
  }
  const std::vector<double>& gammas() const { return gammas_; }
  const std::vector<double>& mus() const { return mus_; }

private:
  StepSchedule(std::vector<double> gammas, std::vector<double> mus);
  std::vector<double> gammas_;
  std::vector<double> mus_;
};

/// The structured inclusion 0 in A x + L* B L x together with the Bregman
/// geometry used to solve it:
///  - A acts on the primal space (dimension of f, h, L columns),
///  - B acts on the dual-side space (dimension of j, L rows),
///  - f is the primal kernel, gstar the kernel hosting the dual variable y*
///    (the product kernel is F(x, y*) = f(x) + gstar(y*)),
///  - h and j are the step kernels driving the two resolvents.
/// The solver computes the best F-approximation, from the start pair, to the
/// set of pairs (x, y*) with -L*y* in Ax and Lx in B^{-1}y*.
struct CompositeProblem {
  MonotoneOperator A;
  MonotoneOperator B;
  LinearMap L;
  LegendreKernel f;
  LegendreKernel gstar;
  LegendreKernel h;
  LegendreKernel j;
  double epsilon = 0.5;
  double delta = 0.5;
  double sigma = 2.0;
  PrimalDualPoint start;

  ProductKernel product_kernel() const { return ProductKernel(f, gstar); }

  /// Checks dimensional consistency, the step-size box (0 < epsilon,
  /// 0 < delta, sigma >= max(epsilon, delta)), structural domain containment
  /// int dom f inside int dom h, and interiority of the start pair.
  /// Throws ValidationError / DimensionError.
  void validate() const;

  /// Additionally checks that every schedule value lies in the box.
  void validate_schedule(const StepSchedule& schedule) const;
};

/// Everything one iteration produces.  `current` and `n` are inputs to
/// step(); all remaining fields are outputs.
struct IterationState {
  std::size_t n = 0;
  PrimalDualPoint current;   // (x_n, y_n*)
  Vec a, a_star;             // graph point of A at the primal resolvent
  Vec b, b_star;             // graph point of B at the dual resolvent
  HalfSpace cut;             // outer approximation of the target set
  PrimalDualPoint half;      // projection of current onto the cut
  PrimalDualPoint next;      // projection of start onto both half-spaces
  double kt_residual = 0.0;  // ||a* + L* b*|| + ||L a - b||
  double d_half = 0.0;       // D^F(half, current)
  double d_full = 0.0;       // D^F(next, current)
};

enum class TerminationReason {
  Tolerance,
  ExactFixedPoint,
  WholeSpaceHalfspace,
  MaxIters,
  NumericalFailure,
};

const char* to_string(TerminationReason r);

struct TraceRow {
  std::size_t n;
  double gamma;
  double mu;
  double kt_residual;
  double d_full;
  double d_half;
  /// Post-step iterate (x_{n+1}, y*_{n+1}); filled only when vector tracing
  /// is enabled.
  Vec x;
  Vec ystar;
};

struct SolverOptions {
  std::size_t max_iters = 10000;
  double tol = 1e-8;
  bool record_trace = true;
  bool trace_vectors = false;
};

struct SolveReport {
  PrimalDualPoint final;
  TerminationReason reason = TerminationReason::MaxIters;
  std::size_t iterations = 0;      // completed steps
  std::vector<TraceRow> trace;
  /// True when `final` is the graph pair (a_n, b_n*) certified by a
  /// vanishing cut normal rather than the current iterate; the two coincide
  /// up to the normal's norm.
  bool solution_from_graph = false;
  std::string message;             // diagnostics for NumericalFailure

  bool converged() const {
    return reason == TerminationReason::Tolerance ||
           reason == TerminationReason::ExactFixedPoint ||
           reason == TerminationReason::WholeSpaceHalfspace;
  }
};

/// Half-space {(x, y*) : <x, a*+L*b*> + <b-La, y*> <= <a,a*> + <b,b*>}
/// cut from the graph pairs (a, a*) and (b, b*).  Every target pair
/// satisfies it; the normal vanishes exactly when (a, b*) is itself a
/// target pair.
HalfSpace kuhn_tucker_halfspace(const Vec& a, const Vec& a_star, const Vec& b,
                                const Vec& b_star, const LinearMap& L);

/// ||a* + L* b*||_2 + ||L a - b||_2; zero exactly on target pairs.
double kt_residual(const Vec& a, const Vec& a_star, const Vec& b,
                   const Vec& b_star, const LinearMap& L);

/// One iteration from state.current at index state.n: resolvents of A and B,
/// the induced half-space cut, the half-iterate (projection of current onto
/// the cut), and the next iterate (projection of the start onto the two
/// separating half-spaces).  Throws on resolvent/projection failure; solve()
/// converts those into a NumericalFailure report.
IterationState step(const CompositeProblem& problem,
                    const StepSchedule& schedule, const IterationState& state);

/// Runs the outer loop until one of:
///  - the graph pair reproduces the iterate bitwise -> ExactFixedPoint,
///  - the cut normal has norm <= 1e-14 -> WholeSpaceHalfspace (final point
///    is the certified graph pair, flagged via solution_from_graph),
///  - kt_residual <= tol and D^F(half, current) <= tol -> Tolerance,
///  - max_iters elapsed -> MaxIters.
/// Never throws on numerical failure inside the loop; reports it instead.
SolveReport solve(const CompositeProblem& problem, const StepSchedule& schedule,
                  const SolverOptions& opts = {});

} // namespace bregkt
