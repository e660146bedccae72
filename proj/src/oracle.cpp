#include "bregkt/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "bregkt/errors.hpp"

namespace bregkt {

namespace {

Eigen::MatrixXd to_eigen(const LinearMap& L) {
  Eigen::MatrixXd M(L.rows(), L.cols());
  for (std::size_t r = 0; r < L.rows(); ++r)
    for (std::size_t c = 0; c < L.cols(); ++c) M(r, c) = L.at(r, c);
  return M;
}

Eigen::VectorXd to_eigen(const Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

Vec from_eigen(const Eigen::VectorXd& v) {
  return Vec(v.data(), v.data() + v.size());
}

struct AffineForms {
  Eigen::MatrixXd MA, MB, L;
  Eigen::VectorXd qA, qB;
};

AffineForms affine_forms(const CompositeProblem& problem) {
  const auto fa = problem.A.as_affine_map();
  const auto fb = problem.B.as_affine_map();
  if (!fa || !fb)
    throw DispatchError(
        "oracle: A and B must be single-valued affine operators");
  return {to_eigen(fa->first), to_eigen(fb->first), to_eigen(problem.L),
          to_eigen(fa->second), to_eigen(fb->second)};
}

/// Diagonal of the Hessian of F at an interior product point.
Vec hessian_diagonal(const ProductKernel& F, const PrimalDualPoint& z) {
  Vec d(z.primal_dim() + z.dual_dim());
  for (std::size_t i = 0; i < z.primal_dim(); ++i) {
    const auto seg = F.primal().segment_at(i);
    d[i] = scalar_kernel::grad_deriv(seg.kind, seg.p, z.x[i]);
  }
  for (std::size_t i = 0; i < z.dual_dim(); ++i) {
    const auto seg = F.dual().segment_at(i);
    d[z.primal_dim() + i] =
        scalar_kernel::grad_deriv(seg.kind, seg.p, z.ystar[i]);
  }
  return d;
}

/// Exact Euclidean projection of u onto {t : G t <= d} by active-set
/// enumeration (intended for a handful of constraints).
Eigen::VectorXd project_polytope(const Eigen::MatrixXd& G,
                                 const Eigen::VectorXd& d,
                                 const Eigen::VectorXd& u) {
  const int mcon = static_cast<int>(G.rows());
  const int dim = static_cast<int>(u.size());
  const double feas_tol = 1e-10;
  if (mcon == 0) return u;
  if (mcon > 20) throw ValidationError("polytope projection: too many constraints");

  const auto feasible = [&](const Eigen::VectorXd& t) {
    return ((G * t - d).array() <= feas_tol).all();
  };
  if (feasible(u)) return u;

  Eigen::VectorXd best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << mcon); ++mask) {
    std::vector<int> act;
    for (int jc = 0; jc < mcon; ++jc)
      if (mask & (1u << jc)) act.push_back(jc);
    const int na = static_cast<int>(act.size());
    if (na > dim) continue;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim + na, dim + na);
    K.topLeftCorner(dim, dim).setIdentity();
    Eigen::VectorXd rhs(dim + na);
    rhs.head(dim) = u;
    for (int r = 0; r < na; ++r) {
      K.block(dim + r, 0, 1, dim) = G.row(act[r]);
      K.block(0, dim + r, dim, 1) = G.row(act[r]).transpose();
      rhs(dim + r) = d(act[r]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd t = sol.head(dim);
    const Eigen::VectorXd lam = sol.tail(na);
    if ((lam.array() < -1e-10).any()) continue;
    if (!feasible(t)) continue;
    const double dist = (t - u).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = t;
    }
  }
  if (!std::isfinite(best_dist))
    throw InfeasibleError("polytope projection: no active set was consistent");
  return best;
}

} // namespace

KTDescription kt_set_affine(const CompositeProblem& problem) {
  const AffineForms af = affine_forms(problem);
  const Eigen::MatrixXd K = af.MA + af.L.transpose() * af.MB * af.L;
  const Eigen::VectorXd rhs = -af.qA - af.L.transpose() * af.qB;

  const auto dual_of = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(af.MB * (af.L * x) + af.qB);
  };

  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  lu.setThreshold(1e-10);
  KTDescription out;
  if (lu.isInvertible()) {
    const Eigen::VectorXd x = lu.solve(rhs);
    out.kind = KTDescription::Kind::Singleton;
    out.point = {from_eigen(x), from_eigen(dual_of(x))};
    return out;
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
  const Eigen::VectorXd xp = cod.solve(rhs);
  if ((K * xp - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) {
    out.kind = KTDescription::Kind::Empty;
    return out;
  }
  const Eigen::MatrixXd N = lu.kernel();
  out.kind = KTDescription::Kind::AffineFamily;
  out.point = {from_eigen(xp), from_eigen(dual_of(xp))};
  for (Eigen::Index c = 0; c < N.cols(); ++c) {
    const Eigen::VectorXd v = N.col(c);
    out.basis.push_back(
        {from_eigen(v), from_eigen(Eigen::VectorXd(af.MB * (af.L * v)))});
  }
  return out;
}

double kt_membership_residual(const CompositeProblem& problem,
                              const PrimalDualPoint& z) {
  const AffineForms af = affine_forms(problem);
  const Eigen::VectorXd x = to_eigen(z.x);
  const Eigen::VectorXd y = to_eigen(z.ystar);
  const double primal = (af.MA * x + af.qA + af.L.transpose() * y).norm();
  const double dual = (af.MB * (af.L * x) + af.qB - y).norm();
  return primal + dual;
}

PrimalDualPoint best_approx_bruteforce(const ProductKernel& F,
                                       const KTDescription& Z,
                                       const PrimalDualPoint& start,
                                       std::uint64_t seed, int restarts) {
  switch (Z.kind) {
    case KTDescription::Kind::Empty:
      throw ValidationError("best approximation over an empty set");
    case KTDescription::Kind::Singleton: return Z.point;
    default: break;
  }

  const std::size_t nx = Z.point.primal_dim();
  const std::size_t dim = nx + Z.point.dual_dim();
  const int k = static_cast<int>(Z.basis.size());
  // Flatten the parametrization z(t) = point + V t.
  Eigen::MatrixXd V(dim, k);
  for (int c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < nx; ++i) V(i, c) = Z.basis[c].x[i];
    for (std::size_t i = nx; i < dim; ++i)
      V(i, c) = Z.basis[c].ystar[i - nx];
  }
  const auto point_at = [&](const Eigen::VectorXd& t) {
    const Eigen::VectorXd z = to_eigen(F.pack(Z.point)) + V * t;
    return F.unpack(from_eigen(z));
  };
  const auto objective = [&](const Eigen::VectorXd& t) {
    return F.bregman(point_at(t), start).ieee();
  };
  const auto grad_at = [&](const PrimalDualPoint& z) {
    const Eigen::VectorXd gz =
        to_eigen(F.pack(F.gradient(z))) - to_eigen(F.pack(F.gradient(start)));
    return Eigen::VectorXd(V.transpose() * gz);
  };

  // Inequalities in t-space: <point + V t, n_j> <= off_j.
  const int mcon = static_cast<int>(Z.inequalities.size());
  Eigen::MatrixXd G(mcon, k);
  Eigen::VectorXd dvec(mcon);
  for (int jc = 0; jc < mcon; ++jc) {
    const auto& hs = Z.inequalities[jc];
    Eigen::VectorXd n(dim);
    for (std::size_t i = 0; i < nx; ++i) n(i) = hs.normal.x[i];
    for (std::size_t i = nx; i < dim; ++i) n(i) = hs.normal.ystar[i - nx];
    G.row(jc) = (V.transpose() * n).transpose();
    dvec(jc) = hs.offset - to_eigen(F.pack(Z.point)).dot(n);
  }
  const bool constrained = mcon > 0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::VectorXd best_t;
  double best_val = std::numeric_limits<double>::infinity();
  bool any_converged = false;

  for (int attempt = 0; attempt <= restarts; ++attempt) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(k);
    if (attempt > 0)
      for (int i = 0; i < k; ++i) t(i) = gauss(rng);
    if (constrained) t = project_polytope(G, dvec, t);
    // Pull the start into the interior of dom F.
    for (int halvings = 0; halvings < 200 && !std::isfinite(objective(t));
         ++halvings)
      t *= 0.5;
    if (!std::isfinite(objective(t))) continue;

    bool converged = false;
    for (int iter = 0; iter < 300; ++iter) {
      const PrimalDualPoint z = point_at(t);
      const Eigen::VectorXd g = grad_at(z);
      Eigen::VectorXd target_step;
      if (constrained) {
        // Projected-gradient stationarity: t == P_T(t - g).
        const Eigen::VectorXd proj = project_polytope(G, dvec, t - g);
        if ((t - proj).norm() <= 1e-10 * (1.0 + t.norm())) {
          converged = true;
          break;
        }
        target_step = proj - t;
      } else {
        if (g.norm() <= 1e-10) {
          converged = true;
          break;
        }
        const Vec hd = hessian_diagonal(F, z);
        const Eigen::MatrixXd H =
            V.transpose() * to_eigen(hd).asDiagonal() * V;
        target_step = H.ldlt().solve(-g);
        if (!target_step.allFinite()) target_step = -g;
      }
      const double phi0 = objective(t);
      const double slope = g.dot(target_step);
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
        Eigen::VectorXd cand = t + alpha * target_step;
        if (constrained) cand = project_polytope(G, dvec, cand);
        const double val = objective(cand);
        if (std::isfinite(val) && val <= phi0 + 1e-4 * alpha * slope) {
          t = cand;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (!converged) continue;
    const double val = objective(t);
    any_converged = true;
    if (val < best_val) {
      best_val = val;
      best_t = t;
    }
  }

  if (!any_converged)
    throw RootFindError(
        "best_approx_bruteforce: no restart reached first-order stationarity");
  return point_at(best_t);
}

} // namespace bregkt
