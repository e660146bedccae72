#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "bregkt/kernels.hpp"
#include "bregkt/linear_map.hpp"
#include "bregkt/vec.hpp"

namespace bregkt {

/// Per-coordinate convex-function specification for separable
/// subdifferential operators.  Each kind carries its derivative, second
/// derivative, and the open interval on which the derivative is defined:
///
///   Entropy(omega)     xi ln xi - omega xi   phi' = ln xi + 1 - omega  (0, inf)
///   Power(p), p >= 1   |xi|^p / p            phi' = sgn(xi)|xi|^{p-1}  R for p>1,
///                                            (p=1: phi = xi on the positive axis)
///   InversePower(p>=1) xi^{-p} / p           phi' = -xi^{-(p+1)}       (0, inf)
///   NegPower(0<p<1)    -xi^p / p             phi' = -xi^{p-1}          (0, inf)
///   Quadratic(c >= 0)  c xi^2 / 2            phi' = c xi               R
///   CoEntropy          (1-xi)ln(1-xi) + xi   phi' = -ln(1-xi)          (-inf, 1)
enum class PhiKind { Entropy, Power, InversePower, NegPower, Quadratic, CoEntropy };

struct ScalarPhi {
  PhiKind kind;
  double param = 0.0; // omega, p, or c depending on kind

  double deriv(double xi) const;
  double deriv2(double xi) const;
  scalar_kernel::Interval domain() const;
  void validate() const;
};

/// Maximally monotone operator exposed only through its Bregman resolvent
/// (grad h + gamma A)^{-1}.  Block-diagonal structure: a list of blocks,
/// each of one kind, partitioning the coordinates.  Uniform operators are a
/// single block.  Monotonicity beyond the checks stated per kind is a
/// user-declared property of the input.
class MonotoneOperator {
public:
  enum class Kind { Zero, Separable, MatchedKernel, Skew2x2, Affine };

  struct Block {
    Kind kind;
    std::size_t dim;
    std::vector<ScalarPhi> phis; // Separable: one spec per coordinate
    double beta = 0.0;           // Skew2x2
    LinearMap M;                 // Affine: x -> Mx + q
    Vec q;
  };

  static MonotoneOperator zero(std::size_t dim);
  static MonotoneOperator separable(std::vector<ScalarPhi> phis);
  static MonotoneOperator separable_uniform(std::size_t dim, ScalarPhi phi);
  /// The subdifferential of the governing kernel itself (phi = h).
  static MonotoneOperator matched_kernel(std::size_t dim);
  /// (xi1, xi2) |-> (beta xi1 - psi'(xi1) - xi2, xi1 + beta xi2 - psi'(xi2))
  /// where psi is the coordinate function of the kernel h it is paired
  /// with; monotone when psi' is beta-Lipschitz (user-declared).
  static MonotoneOperator skew2x2(double beta);
  /// x -> Mx + q; requires M + M^T positive semidefinite (eigenvalue floor
  /// >= -1e-10, checked at construction).
  static MonotoneOperator affine(LinearMap M, Vec q);
  static MonotoneOperator block_diagonal(std::vector<MonotoneOperator> parts);

  std::size_t dimension() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Single-valued affine representation x -> Mx + q when every block has
  /// one (Zero, Affine, all-Quadratic Separable); nullopt otherwise.
  std::optional<std::pair<LinearMap, Vec>> as_affine_map() const;

private:
  MonotoneOperator(std::vector<Block> blocks);

  std::vector<Block> blocks_;
  std::size_t dim_ = 0;
};

/// Bregman resolvent a = (grad h + gamma A)^{-1}(r*): the unique a,
/// interior to dom h, with grad h(a) + gamma * (an element of A a) = r*.
///
/// Dispatch, per block:
///   Zero:          a = grad h*(r*)
///   MatchedKernel: a = grad h*(r* / (1 + gamma))               (any h, any gamma)
///   Skew2x2:       gamma = 1: a = ((beta r1 + r2)/(1+beta^2),
///                               (beta r2 - r1)/(1+beta^2)), any h, with an
///                  interiority check; gamma != 1 with Energy h: 2x2 dense
///                  solve of the concrete affine form; otherwise unregistered.
///   Affine:        Energy h: dense solve (I + gamma M) a = r* - gamma q;
///                  diagonal M with any h: per-coordinate Newton; otherwise
///                  unregistered.
///   Separable:     closed forms where registered (see below), otherwise a
///                  per-coordinate safeguarded Newton on
///                  grad h_i(a) + gamma phi_i'(a) = r*_i.
///
/// Registered separable closed forms:
///   Boltzmann-Shannon h:
///     Entropy(omega):        a = exp((r* + gamma(omega-1)) / (gamma+1))
///     Power(p>1):            a = (W(gamma(p-1) e^{(p-1) r*}) / (gamma(p-1)))^{1/(p-1)}
///     Power(p=1):            a = exp(r* - gamma)
///     InversePower(p>=1):    a = (W(gamma(p+1) e^{-(p+1) r*}) / (gamma(p+1)))^{-1/(p+1)}
///     NegPower(0<p<1):       a = (W(gamma(1-p) e^{(p-1) r*}) / (gamma(1-p)))^{1/(p-1)}
///     Quadratic(c>0):        a = W(gamma c e^{r*}) / (gamma c)
///   Fermi-Dirac h (gamma = 1 only; the stated forms do not extend):
///     Entropy(omega):        a = 2 / (1 + sqrt(1 + 4 e^{-c})), c = r* + omega - 1
///     CoEntropy:             a = 1 - 2 / (1 + sqrt(1 + 4 e^{r*}))
///   Energy h:
///     Quadratic(c):          a = r* / (1 + gamma c)
///
/// Throws DispatchError for unregistered pairs without a smooth fallback
/// and RootFindError when the Newton fallback cannot bracket or converge
/// within 200 iterations (e.g. when the declared coercivity precondition
/// fails and no solution exists in the domain).
Vec resolvent(const MonotoneOperator& op, const LegendreKernel& h, double gamma,
              const Vec& rstar);

/// A point of gra(op) produced by the resolvent identity: by construction
/// grad h(x) - gamma (a* + w*) = grad h(a).
struct GraphPoint {
  Vec a;
  Vec a_star;
};

/// a = resolvent(op, h, gamma, grad h(x) - gamma w*),
/// a* = gamma^{-1}(grad h(x) - grad h(a)) - w*; the pair lies on gra(op) up
/// to resolvent tolerance.
GraphPoint graph_point(const MonotoneOperator& op, const LegendreKernel& h,
                       double gamma, const Vec& x, const Vec& wstar);

} // namespace bregkt
