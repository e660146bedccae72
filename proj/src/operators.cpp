#include "bregkt/operators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "bregkt/errors.hpp"
#include "bregkt/lambert.hpp"
#include "bregkt/parallel.hpp"

namespace bregkt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// ScalarPhi
// ---------------------------------------------------------------------------

double ScalarPhi::deriv(double xi) const {
  switch (kind) {
    case PhiKind::Entropy: return std::log(xi) + 1.0 - param;
    case PhiKind::Power:
      if (param == 1.0) return 1.0;
      return std::copysign(std::pow(std::fabs(xi), param - 1.0), xi);
    case PhiKind::InversePower: return -std::pow(xi, -(param + 1.0));
    case PhiKind::NegPower: return -std::pow(xi, param - 1.0);
    case PhiKind::Quadratic: return param * xi;
    case PhiKind::CoEntropy: return -std::log1p(-xi);
  }
  return 0.0;
}

double ScalarPhi::deriv2(double xi) const {
  switch (kind) {
    case PhiKind::Entropy: return 1.0 / xi;
    case PhiKind::Power:
      if (param == 1.0) return 0.0;
      return (param - 1.0) * std::pow(std::fabs(xi), param - 2.0);
    case PhiKind::InversePower:
      return (param + 1.0) * std::pow(xi, -(param + 2.0));
    case PhiKind::NegPower:
      return (1.0 - param) * std::pow(xi, param - 2.0);
    case PhiKind::Quadratic: return param;
    case PhiKind::CoEntropy: return 1.0 / (1.0 - xi);
  }
  return 0.0;
}

scalar_kernel::Interval ScalarPhi::domain() const {
  switch (kind) {
    case PhiKind::Entropy:
    case PhiKind::InversePower:
    case PhiKind::NegPower: return {0.0, kInf};
    case PhiKind::Power:
      if (param == 1.0) return {0.0, kInf};
      return {-kInf, kInf};
    case PhiKind::Quadratic: return {-kInf, kInf};
    case PhiKind::CoEntropy: return {-kInf, 1.0};
  }
  return {-kInf, kInf};
}

void ScalarPhi::validate() const {
  switch (kind) {
    case PhiKind::Entropy: break;
    case PhiKind::Power:
      if (!(param >= 1.0)) throw ValidationError("power phi requires p >= 1");
      break;
    case PhiKind::InversePower:
      if (!(param >= 1.0))
        throw ValidationError("inverse_power phi requires p >= 1");
      break;
    case PhiKind::NegPower:
      if (!(param > 0.0 && param < 1.0))
        throw ValidationError("neg_power phi requires 0 < p < 1");
      break;
    case PhiKind::Quadratic:
      if (!(param >= 0.0))
        throw ValidationError("quadratic phi requires c >= 0 (monotonicity)");
      break;
    case PhiKind::CoEntropy: break;
  }
}

// ---------------------------------------------------------------------------
// MonotoneOperator construction
// ---------------------------------------------------------------------------

MonotoneOperator::MonotoneOperator(std::vector<Block> blocks)
    : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (b.dim == 0) throw ValidationError("operator block of dimension 0");
    switch (b.kind) {
      case Kind::Separable:
        if (b.phis.size() != b.dim)
          throw ValidationError("separable operator: need one phi per coordinate");
        for (const auto& phi : b.phis) phi.validate();
        break;
      case Kind::Skew2x2:
        if (b.dim != 2)
          throw ValidationError("skew2x2 operator acts on dimension 2");
        if (!(b.beta > 0.0))
          throw ValidationError("skew2x2 operator requires beta > 0");
        break;
      case Kind::Affine:
        if (b.M.rows() != b.dim || b.M.cols() != b.dim || b.q.size() != b.dim)
          throw DimensionError("affine operator: M must be dim x dim, q of size dim");
        break;
      default: break;
    }
    dim_ += b.dim;
  }
  if (dim_ == 0) throw ValidationError("operator of dimension 0");
}

MonotoneOperator MonotoneOperator::zero(std::size_t dim) {
  return MonotoneOperator({Block{Kind::Zero, dim, {}, 0.0, {}, {}}});
}

MonotoneOperator MonotoneOperator::separable(std::vector<ScalarPhi> phis) {
  const std::size_t dim = phis.size();
  return MonotoneOperator({Block{Kind::Separable, dim, std::move(phis), 0.0, {}, {}}});
}

MonotoneOperator MonotoneOperator::separable_uniform(std::size_t dim, ScalarPhi phi) {
  return separable(std::vector<ScalarPhi>(dim, phi));
}

MonotoneOperator MonotoneOperator::matched_kernel(std::size_t dim) {
  return MonotoneOperator({Block{Kind::MatchedKernel, dim, {}, 0.0, {}, {}}});
}

MonotoneOperator MonotoneOperator::skew2x2(double beta) {
  return MonotoneOperator({Block{Kind::Skew2x2, 2, {}, beta, {}, {}}});
}

MonotoneOperator MonotoneOperator::affine(LinearMap M, Vec q) {
  if (M.rows() != M.cols())
    throw DimensionError("affine operator: M must be square");
  const std::size_t n = M.rows();
  // Monotonicity of x -> Mx + q is exactly positive semidefiniteness of the
  // symmetric part; allow a -1e-10 eigenvalue floor for rounding.
  Eigen::MatrixXd S(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) S(r, c) = M.at(r, c) + M.at(c, r);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw ValidationError("affine operator: eigenvalue check failed");
  if (n > 0 && es.eigenvalues().minCoeff() < -1e-10)
    throw ValidationError(
        "affine operator: M + M^T must be positive semidefinite "
        "(min eigenvalue " + std::to_string(es.eigenvalues().minCoeff()) + ")");
  return MonotoneOperator({Block{Kind::Affine, n, {}, 0.0, std::move(M), std::move(q)}});
}

MonotoneOperator MonotoneOperator::block_diagonal(std::vector<MonotoneOperator> parts) {
  std::vector<Block> blocks;
  for (auto& part : parts)
    for (auto& b : part.blocks_) blocks.push_back(std::move(b));
  return MonotoneOperator(std::move(blocks));
}

std::optional<std::pair<LinearMap, Vec>> MonotoneOperator::as_affine_map() const {
  LinearMap M(dim_, dim_);
  Vec q(dim_, 0.0);
  std::size_t off = 0;
  for (const auto& b : blocks_) {
    switch (b.kind) {
      case Kind::Zero: break;
      case Kind::Affine:
        for (std::size_t r = 0; r < b.dim; ++r) {
          for (std::size_t c = 0; c < b.dim; ++c)
            M.at(off + r, off + c) = b.M.at(r, c);
          q[off + r] = b.q[r];
        }
        break;
      case Kind::Separable:
        for (std::size_t i = 0; i < b.dim; ++i) {
          if (b.phis[i].kind != PhiKind::Quadratic) return std::nullopt;
          M.at(off + i, off + i) = b.phis[i].param;
        }
        break;
      default: return std::nullopt;
    }
    off += b.dim;
  }
  return std::make_pair(std::move(M), std::move(q));
}

// ---------------------------------------------------------------------------
// Scalar safeguarded Newton
// ---------------------------------------------------------------------------

namespace {

scalar_kernel::Interval intersect(scalar_kernel::Interval a,
                                  scalar_kernel::Interval b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

/// Solves g(a) = 0 for a strictly increasing g on the open interval dom.
/// Brackets by walking geometrically from an interior seed toward each
/// endpoint, then runs Newton steps safeguarded by bisection; converges
/// when |g| <= tol or the bracket collapses to rounding width.
template <class G, class GP>
double newton_solve_increasing(scalar_kernel::Interval dom, G&& g, GP&& gp,
                               double tol) {
  if (!(dom.lo < dom.hi))
    throw DispatchError("resolvent: empty domain intersection");
  double seed;
  if (std::isfinite(dom.lo) && std::isfinite(dom.hi))
    seed = 0.5 * (dom.lo + dom.hi);
  else if (std::isfinite(dom.lo))
    seed = dom.lo + 1.0;
  else if (std::isfinite(dom.hi))
    seed = dom.hi - 1.0;
  else
    seed = 0.0;

  // Candidate ladders approaching each endpoint.
  const auto toward_hi = [&](int k) {
    if (std::isfinite(dom.hi))
      return dom.hi - (dom.hi - seed) * std::ldexp(1.0, -k);
    return seed + (std::ldexp(1.0, k) - 1.0);
  };
  const auto toward_lo = [&](int k) {
    if (std::isfinite(dom.lo))
      return dom.lo + (seed - dom.lo) * std::ldexp(1.0, -k);
    return seed - (std::ldexp(1.0, k) - 1.0);
  };

  double lo = seed, hi = seed;
  double glo = g(seed), ghi = glo;
  bool have_lo = glo <= 0.0, have_hi = ghi >= 0.0;
  for (int k = 1; k <= 200 && !(have_lo && have_hi); ++k) {
    if (!have_hi) {
      hi = toward_hi(k);
      ghi = g(hi);
      if (std::isnan(ghi)) continue;
      have_hi = ghi >= 0.0;
    }
    if (!have_lo) {
      lo = toward_lo(k);
      glo = g(lo);
      if (std::isnan(glo)) continue;
      have_lo = glo <= 0.0;
    }
  }
  if (!(have_lo && have_hi))
    throw RootFindError(
        "resolvent: could not bracket a solution in the kernel domain "
        "(is the declared coercivity precondition satisfied?)");

  double a = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double ga = g(a);
    if (std::fabs(ga) <= tol) return a;
    if (ga > 0.0)
      hi = a;
    else
      lo = a;
    const double da = gp(a);
    double next = a - ga / da;
    if (!std::isfinite(next) || next <= lo || next >= hi)
      next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max({std::fabs(lo), std::fabs(hi), 1e-300}))
      return next;
    a = next;
  }
  throw RootFindError("resolvent: Newton did not converge within 200 iterations");
}

double newton_tolerance(double r) { return 1e-12 * (1.0 + std::fabs(r)); }

/// Closed-form separable resolvent value, when registered for the
/// (kernel kind, phi kind, gamma) triple.
std::optional<double> separable_closed_form(KernelKind hk, const ScalarPhi& phi,
                                            double gamma, double r) {
  switch (hk) {
    case KernelKind::BoltzmannShannon:
      switch (phi.kind) {
        case PhiKind::Entropy:
          return std::exp((r + gamma * (phi.param - 1.0)) / (gamma + 1.0));
        case PhiKind::Power: {
          const double p = phi.param;
          if (p == 1.0) return std::exp(r - gamma);
          const double c = gamma * (p - 1.0);
          const double w = lambert_w_log(std::log(c) + (p - 1.0) * r);
          return std::pow(w / c, 1.0 / (p - 1.0));
        }
        case PhiKind::InversePower: {
          const double p = phi.param;
          const double c = gamma * (p + 1.0);
          const double w = lambert_w_log(std::log(c) - (p + 1.0) * r);
          return std::pow(w / c, -1.0 / (p + 1.0));
        }
        case PhiKind::NegPower: {
          const double p = phi.param;
          const double c = gamma * (1.0 - p);
          const double w = lambert_w_log(std::log(c) + (p - 1.0) * r);
          return std::pow(w / c, 1.0 / (p - 1.0));
        }
        case PhiKind::Quadratic: {
          const double c = phi.param;
          if (c == 0.0) return std::exp(r);
          const double w = lambert_w_log(std::log(gamma * c) + r);
          return w / (gamma * c);
        }
        default: return std::nullopt;
      }
    case KernelKind::FermiDirac:
      // The stated forms hold for grad h + phi' (unit step) only; other
      // steps fall through to the Newton fallback rather than extrapolate.
      if (gamma != 1.0) return std::nullopt;
      switch (phi.kind) {
        case PhiKind::Entropy: {
          const double c = r + phi.param - 1.0;
          return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * std::exp(-c)));
        }
        case PhiKind::CoEntropy:
          return 1.0 - 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * std::exp(r)));
        default: return std::nullopt;
      }
    case KernelKind::Energy:
      if (phi.kind == PhiKind::Quadratic) return r / (1.0 + gamma * phi.param);
      return std::nullopt;
    default: return std::nullopt;
  }
}

double separable_coordinate(KernelKind hk, double hp, const ScalarPhi& phi,
                            double gamma, double r) {
  if (auto a = separable_closed_form(hk, phi, gamma, r)) return *a;
  const auto dom = intersect(scalar_kernel::interior_interval(hk), phi.domain());
  return newton_solve_increasing(
      dom,
      [&](double a) {
        return scalar_kernel::grad(hk, hp, a) + gamma * phi.deriv(a) - r;
      },
      [&](double a) {
        return scalar_kernel::grad_deriv(hk, hp, a) + gamma * phi.deriv2(a);
      },
      newton_tolerance(r));
}

/// Calls fn(absolute coordinate range [lo, hi), segment) for each kernel
/// segment overlapping the block [off, off + len).
template <class Fn>
void for_each_segment_in(const LegendreKernel& h, std::size_t off,
                         std::size_t len, Fn&& fn) {
  std::size_t seg_off = 0;
  for (const auto& seg : h.segments()) {
    const std::size_t lo = std::max(seg_off, off);
    const std::size_t hi = std::min(seg_off + seg.dim, off + len);
    if (lo < hi) fn(lo, hi, seg);
    seg_off += seg.dim;
  }
}

void require_interior_block(const LegendreKernel& h, const Vec& a,
                            std::size_t off, std::size_t len) {
  for_each_segment_in(h, off, len, [&](std::size_t lo, std::size_t hi,
                                       const KernelSegment& seg) {
    for (std::size_t i = lo; i < hi; ++i)
      if (!scalar_kernel::interior(seg.kind, a[i]))
        throw RootFindError(
            "resolvent: solution of the linear block system leaves the "
            "kernel domain");
  });
}

} // namespace

// ---------------------------------------------------------------------------
// Resolvent dispatch
// ---------------------------------------------------------------------------

Vec resolvent(const MonotoneOperator& op, const LegendreKernel& h, double gamma,
              const Vec& rstar) {
  if (h.dimension() != op.dimension())
    throw DimensionError("resolvent: operator/kernel dimension mismatch");
  if (rstar.size() != op.dimension())
    throw DimensionError("resolvent: argument dimension mismatch");
  if (!(gamma > 0.0)) throw ValidationError("resolvent requires gamma > 0");

  Vec a(op.dimension(), 0.0);
  std::size_t off = 0;
  for (const auto& blk : op.blocks()) {
    switch (blk.kind) {
      case MonotoneOperator::Kind::Zero:
        for_each_segment_in(h, off, blk.dim,
                            [&](std::size_t lo, std::size_t hi,
                                const KernelSegment& seg) {
                              par::for_each(hi - lo, [&](std::size_t i) {
                                a[lo + i] = scalar_kernel::conj_grad(
                                    seg.kind, seg.p, rstar[lo + i]);
                              });
                            });
        break;
      case MonotoneOperator::Kind::MatchedKernel: {
        const double scale = 1.0 / (1.0 + gamma);
        for_each_segment_in(h, off, blk.dim,
                            [&](std::size_t lo, std::size_t hi,
                                const KernelSegment& seg) {
                              par::for_each(hi - lo, [&](std::size_t i) {
                                a[lo + i] = scalar_kernel::conj_grad(
                                    seg.kind, seg.p, rstar[lo + i] * scale);
                              });
                            });
        break;
      }
      case MonotoneOperator::Kind::Skew2x2: {
        const double beta = blk.beta;
        const double r1 = rstar[off], r2 = rstar[off + 1];
        if (gamma == 1.0) {
          // grad h + A collapses to the linear map [[beta, -1], [1, beta]]
          // regardless of the kernel, because the psi' terms cancel.
          const double det = 1.0 + beta * beta;
          a[off] = (beta * r1 + r2) / det;
          a[off + 1] = (beta * r2 - r1) / det;
        } else if (h.slice(off, 2).uniform(KernelKind::Energy)) {
          // With the Energy kernel the operator is concretely affine, so
          // any step size reduces to a 2x2 linear solve.
          const double d = 1.0 + gamma * (beta - 1.0);
          const double det = d * d + gamma * gamma;
          a[off] = (d * r1 + gamma * r2) / det;
          a[off + 1] = (d * r2 - gamma * r1) / det;
        } else {
          throw DispatchError(
              "skew2x2 resolvent is registered for gamma = 1 (any kernel) "
              "or the energy kernel (any gamma)");
        }
        require_interior_block(h, a, off, 2);
        break;
      }
      case MonotoneOperator::Kind::Affine: {
        const LegendreKernel hs = h.slice(off, blk.dim);
        if (hs.uniform(KernelKind::Energy)) {
          // (I + gamma M) a = r* - gamma q; the symmetric part of I+gamma M
          // dominates the identity, so the system is always solvable.
          const std::size_t n = blk.dim;
          Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
          Eigen::VectorXd rhs(n);
          for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c)
              S(r, c) += gamma * blk.M.at(r, c);
            rhs(r) = rstar[off + r] - gamma * blk.q[r];
          }
          const Eigen::VectorXd sol = S.partialPivLu().solve(rhs);
          for (std::size_t r = 0; r < n; ++r) a[off + r] = sol(r);
        } else {
          // Separable (diagonal) affine operators reduce to per-coordinate
          // scalar equations under any kernel.
          bool diagonal = true;
          for (std::size_t r = 0; r < blk.dim && diagonal; ++r)
            for (std::size_t c = 0; c < blk.dim && diagonal; ++c)
              if (r != c && blk.M.at(r, c) != 0.0) diagonal = false;
          if (!diagonal)
            throw DispatchError(
                "affine resolvent with a non-energy kernel requires "
                "a diagonal matrix (separable operator)");
          for_each_segment_in(
              h, off, blk.dim,
              [&](std::size_t lo, std::size_t hi, const KernelSegment& seg) {
                par::for_each(hi - lo, [&](std::size_t i) {
                  const std::size_t coord = lo + i - off;
                  const double m = blk.M.at(coord, coord);
                  const double qv = blk.q[coord];
                  const double r = rstar[lo + i];
                  a[lo + i] = newton_solve_increasing(
                      scalar_kernel::interior_interval(seg.kind),
                      [&](double t) {
                        return scalar_kernel::grad(seg.kind, seg.p, t) +
                               gamma * (m * t + qv) - r;
                      },
                      [&](double t) {
                        return scalar_kernel::grad_deriv(seg.kind, seg.p, t) +
                               gamma * m;
                      },
                      newton_tolerance(r));
                });
              });
        }
        break;
      }
      case MonotoneOperator::Kind::Separable:
        for_each_segment_in(
            h, off, blk.dim,
            [&](std::size_t lo, std::size_t hi, const KernelSegment& seg) {
              par::for_each(hi - lo, [&](std::size_t i) {
                const ScalarPhi& phi = blk.phis[lo + i - off];
                a[lo + i] = separable_coordinate(seg.kind, seg.p, phi, gamma,
                                                 rstar[lo + i]);
              });
            });
        break;
    }
    off += blk.dim;
  }
  return a;
}

GraphPoint graph_point(const MonotoneOperator& op, const LegendreKernel& h,
                       double gamma, const Vec& x, const Vec& wstar) {
  require_same_dim(x, wstar, "graph_point");
  const Vec gh = h.gradient(x);
  const Vec r = axpy(gh, -gamma, wstar);
  Vec a = resolvent(op, h, gamma, r);
  const Vec gha = h.gradient(a);
  Vec astar(a.size());
  par::for_each(a.size(), [&](std::size_t i) {
    astar[i] = (gh[i] - gha[i]) / gamma - wstar[i];
  });
  return {std::move(a), std::move(astar)};
}

} // namespace bregkt
