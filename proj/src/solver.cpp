#include "bregkt/solver.hpp"

#include <cmath>
#include <utility>

#include "bregkt/errors.hpp"

namespace bregkt {

namespace {
constexpr double kWholeSpaceNormTol = 1e-14;

bool bitwise_equal(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

scalar_kernel::Interval coordinate_interval(const LegendreKernel& k,
                                            std::size_t coord) {
  return scalar_kernel::interior_interval(k.segment_at(coord).kind);
}
} // namespace

// ---------------------------------------------------------------------------
// StepSchedule
// ---------------------------------------------------------------------------

StepSchedule::StepSchedule(std::vector<double> gammas, std::vector<double> mus)
    : gammas_(std::move(gammas)), mus_(std::move(mus)) {
  if (gammas_.empty() || mus_.empty())
    throw ValidationError("step schedule needs at least one gamma and one mu");
  for (double g : gammas_)
    if (!(g > 0.0) || !std::isfinite(g))
      throw ValidationError("step schedule: gamma values must be positive");
  for (double m : mus_)
    if (!(m > 0.0) || !std::isfinite(m))
      throw ValidationError("step schedule: mu values must be positive");
}

StepSchedule StepSchedule::constant(double gamma, double mu) {
  return StepSchedule({gamma}, {mu});
}

StepSchedule StepSchedule::cyclic(std::vector<double> gammas,
                                  std::vector<double> mus) {
  return StepSchedule(std::move(gammas), std::move(mus));
}

// ---------------------------------------------------------------------------
// CompositeProblem
// ---------------------------------------------------------------------------

void CompositeProblem::validate() const {
  const std::size_t nx = f.dimension();
  const std::size_t ny = gstar.dimension();
  if (A.dimension() != nx || h.dimension() != nx)
    throw DimensionError("problem: A, f, h must share the primal dimension");
  if (B.dimension() != ny || j.dimension() != ny)
    throw DimensionError("problem: B, gstar, j must share the dual dimension");
  if (L.cols() != nx || L.rows() != ny)
    throw DimensionError("problem: L must map the primal space to the dual-side space");
  if (start.x.size() != nx || start.ystar.size() != ny)
    throw DimensionError("problem: start pair has wrong dimensions");
  if (!(epsilon > 0.0) || !(delta > 0.0))
    throw ValidationError("problem: epsilon and delta must be positive");
  if (!(sigma >= epsilon) || !(sigma >= delta))
    throw ValidationError("problem: sigma must be >= max(epsilon, delta)");
  // Structural containment: the interior domain of f must sit inside the
  // interior domain of h, coordinate by coordinate, so that every iterate
  // is a valid resolvent argument.
  for (std::size_t i = 0; i < nx; ++i) {
    const auto df = coordinate_interval(f, i);
    const auto dh = coordinate_interval(h, i);
    if (df.lo < dh.lo || df.hi > dh.hi)
      throw ValidationError(
          "problem: int dom f must be contained in int dom h (coordinate " +
          std::to_string(i) + ")");
  }
  if (!f.is_interior(start.x))
    throw ValidationError("problem: start x0 is not interior to dom f");
  if (!gstar.is_interior(start.ystar))
    throw ValidationError("problem: start y0* is not interior to dom g*");
}

void CompositeProblem::validate_schedule(const StepSchedule& schedule) const {
  for (double g : schedule.gammas())
    if (g < epsilon || g > sigma)
      throw ValidationError("schedule: gamma outside [epsilon, sigma]");
  for (double m : schedule.mus())
    if (m < delta || m > sigma)
      throw ValidationError("schedule: mu outside [delta, sigma]");
}

// ---------------------------------------------------------------------------
// Cut construction and residual
// ---------------------------------------------------------------------------

HalfSpace kuhn_tucker_halfspace(const Vec& a, const Vec& a_star, const Vec& b,
                                const Vec& b_star, const LinearMap& L) {
  PrimalDualPoint normal{axpy(a_star, 1.0, L.adjoint_apply(b_star)),
                         sub(b, L.apply(a))};
  const double offset = dot(a, a_star) + dot(b, b_star);
  return HalfSpace{std::move(normal), offset};
}

double kt_residual(const Vec& a, const Vec& a_star, const Vec& b,
                   const Vec& b_star, const LinearMap& L) {
  return norm2(axpy(a_star, 1.0, L.adjoint_apply(b_star))) +
         norm2(sub(L.apply(a), b));
}

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::Tolerance: return "tolerance";
    case TerminationReason::ExactFixedPoint: return "exact_fixed_point";
    case TerminationReason::WholeSpaceHalfspace: return "whole_space_halfspace";
    case TerminationReason::MaxIters: return "max_iters";
    case TerminationReason::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// One iteration
// ---------------------------------------------------------------------------

IterationState step(const CompositeProblem& problem,
                    const StepSchedule& schedule, const IterationState& state) {
  IterationState out;
  out.n = state.n;
  out.current = state.current;
  const auto [gamma, mu] = schedule.at(state.n);

  if (!problem.f.is_interior(state.current.x))
    throw DomainError("step: x_n left the interior of dom f");
  if (!problem.gstar.is_interior(state.current.ystar))
    throw DomainError("step: y_n* left the interior of dom g*");

  const Vec lstar_y = problem.L.adjoint_apply(state.current.ystar);
  GraphPoint ga = graph_point(problem.A, problem.h, gamma, state.current.x,
                              lstar_y);
  const Vec lx = problem.L.apply(state.current.x);
  GraphPoint gb = graph_point(problem.B, problem.j, mu, lx,
                              negate(state.current.ystar));
  out.a = std::move(ga.a);
  out.a_star = std::move(ga.a_star);
  out.b = std::move(gb.a);
  out.b_star = std::move(gb.a_star);
  out.cut = kuhn_tucker_halfspace(out.a, out.a_star, out.b, out.b_star,
                                  problem.L);
  out.kt_residual =
      kt_residual(out.a, out.a_star, out.b, out.b_star, problem.L);

  const ProductKernel F = problem.product_kernel();
  out.half = project_halfspace(F, state.current, out.cut).point;
  out.next = q_projection(F, problem.start, state.current, out.half).point;
  out.d_half = F.bregman(out.half, state.current).ieee();
  out.d_full = F.bregman(out.next, state.current).ieee();
  return out;
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

SolveReport solve(const CompositeProblem& problem, const StepSchedule& schedule,
                  const SolverOptions& opts) {
  problem.validate();
  problem.validate_schedule(schedule);

  SolveReport report;
  IterationState state;
  state.current = problem.start;

  const auto push_trace = [&](const IterationState& s, double d_full,
                              double d_half, const PrimalDualPoint& post) {
    if (!opts.record_trace) return;
    const auto [gamma, mu] = schedule.at(s.n);
    TraceRow row{s.n, gamma, mu, s.kt_residual, d_full, d_half, {}, {}};
    if (opts.trace_vectors) {
      row.x = post.x;
      row.ystar = post.ystar;
    }
    report.trace.push_back(std::move(row));
  };

  for (std::size_t n = 0; n < opts.max_iters; ++n) {
    state.n = n;
    IterationState it;
    try {
      const auto [gamma, mu] = schedule.at(n);
      if (!problem.f.is_interior(state.current.x) ||
          !problem.gstar.is_interior(state.current.ystar)) {
        report.final = state.current;
        report.reason = TerminationReason::NumericalFailure;
        report.iterations = n;
        report.message = "iterate left the interior of its domain";
        return report;
      }

      // Graph pairs and the cut come first so the two certificate-based
      // exits can fire without touching the projections.
      const Vec lstar_y = problem.L.adjoint_apply(state.current.ystar);
      GraphPoint ga =
          graph_point(problem.A, problem.h, gamma, state.current.x, lstar_y);
      const Vec lx = problem.L.apply(state.current.x);
      GraphPoint gb =
          graph_point(problem.B, problem.j, mu, lx, negate(state.current.ystar));
      it.n = n;
      it.current = state.current;
      it.a = std::move(ga.a);
      it.a_star = std::move(ga.a_star);
      it.b = std::move(gb.a);
      it.b_star = std::move(gb.a_star);
      it.cut =
          kuhn_tucker_halfspace(it.a, it.a_star, it.b, it.b_star, problem.L);
      it.kt_residual =
          kt_residual(it.a, it.a_star, it.b, it.b_star, problem.L);

      if (bitwise_equal(it.a, state.current.x) &&
          bitwise_equal(it.b_star, state.current.ystar)) {
        // The iterate reproduces itself through both resolvents: it is a
        // target pair, and the best approximation reached.
        push_trace(it, 0.0, 0.0, state.current);
        report.final = state.current;
        report.reason = TerminationReason::ExactFixedPoint;
        report.iterations = n;
        return report;
      }
      if (norm2(it.cut.normal) <= kWholeSpaceNormTol) {
        // Vacuous cut: the graph pair itself is certified as a target pair.
        push_trace(it, 0.0, 0.0, {it.a, it.b_star});
        report.final = {it.a, it.b_star};
        report.reason = TerminationReason::WholeSpaceHalfspace;
        report.iterations = n;
        report.solution_from_graph = true;
        return report;
      }

      const ProductKernel F = problem.product_kernel();
      it.half = project_halfspace(F, state.current, it.cut).point;
      it.next = q_projection(F, problem.start, state.current, it.half).point;
      it.d_half = F.bregman(it.half, state.current).ieee();
      it.d_full = F.bregman(it.next, state.current).ieee();
    } catch (const Error& e) {
      report.final = state.current;
      report.reason = TerminationReason::NumericalFailure;
      report.iterations = n;
      report.message = e.what();
      return report;
    }

    push_trace(it, it.d_full, it.d_half, it.next);

    if (it.kt_residual <= opts.tol && it.d_half <= opts.tol) {
      report.final = it.next;
      report.reason = TerminationReason::Tolerance;
      report.iterations = n + 1;
      return report;
    }
    state.current = std::move(it.next);
  }

  report.final = state.current;
  report.reason = TerminationReason::MaxIters;
  report.iterations = opts.max_iters;
  return report;
}

} // namespace bregkt
