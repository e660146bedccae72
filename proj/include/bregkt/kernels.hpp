#pragma once

#include <cstddef>
#include <vector>

#include "bregkt/extended.hpp"
#include "bregkt/vec.hpp"

namespace bregkt {

/// Catalog of Legendre functions on R^m.  All kinds act coordinate-
/// separably; the per-coordinate pieces are:
///
///   Energy            xi^2/2                 on R
///   BoltzmannShannon  xi ln xi - xi          on [0,inf), value 0 at xi=0
///   FermiDirac        xi ln xi+(1-xi)ln(1-xi) on [0,1], value 0 at {0,1}
///   Hellinger         -sqrt(1-xi^2)          on [-1,1]
///   PPower            |xi|^p/p, p > 1        on R
///
/// Each is essentially smooth and essentially strictly convex on its
/// domain, so its gradient is a bijection between the interior of its
/// domain and the interior of its conjugate's domain, with inverse equal
/// to the conjugate's gradient.  The conjugate gradients are closed-form
/// (identity, exp, logistic, algebraic, dual power), never numeric
/// inversions, so outputs are automatically interior.
enum class KernelKind { Energy, BoltzmannShannon, FermiDirac, Hellinger, PPower };

/// Contiguous run of coordinates sharing one scalar kernel.  Block-sum
/// kernels (f = f_1 (+) f_2 (+) ...) are segment lists; the uniform case is
/// a single segment.
struct KernelSegment {
  KernelKind kind;
  double p;        // PPower exponent; ignored by the other kinds
  std::size_t dim;
};

/// Per-coordinate scalar pieces, exposed for the root-finders that solve
/// grad h(a) + gamma phi'(a) = r coordinate-wise.
namespace scalar_kernel {

struct Interval {
  double lo;
  double hi;
};

/// Open interval of the interior domain.
Interval interior_interval(KernelKind k);
bool interior(KernelKind k, double xi);

/// Kernel value; IEEE +inf outside the closed domain, finite closure values
/// on the boundary where the kind defines them (Boltzmann-Shannon value 0
/// at 0, Fermi-Dirac value 0 at {0,1}, Hellinger value 0 at +-1).
double value(KernelKind k, double p, double xi);

/// First and second derivatives on the interior (callers check interiority;
/// these do not).
double grad(KernelKind k, double p, double xi);
double grad_deriv(KernelKind k, double p, double xi);

/// Gradient of the conjugate and its derivative; total on R for every kind.
double conj_grad(KernelKind k, double p, double s);
double conj_grad_deriv(KernelKind k, double p, double s);

} // namespace scalar_kernel

/// A Legendre function with value, gradient, conjugate gradient, Bregman
/// distance, and domain predicates.  Immutable value object; all operations
/// are pure and safe to evaluate concurrently.
class LegendreKernel {
public:
  static LegendreKernel energy(std::size_t dim);
  static LegendreKernel boltzmann_shannon(std::size_t dim);
  static LegendreKernel fermi_dirac(std::size_t dim);
  static LegendreKernel hellinger(std::size_t dim);
  static LegendreKernel p_power(std::size_t dim, double p);
  /// Block-sum kernel: acts as k_1 on the first block, k_2 on the next, ...
  static LegendreKernel concat(const std::vector<LegendreKernel>& parts);

  std::size_t dimension() const { return dim_; }
  const std::vector<KernelSegment>& segments() const { return segments_; }

  /// True when every coordinate uses the given kind.
  bool uniform(KernelKind k) const;

  bool is_interior(const Vec& x) const;

  /// f(x); +inf outside dom f, finite on the closure where the kind
  /// defines it.
  ExtendedReal value(const Vec& x) const;

  /// grad f(x); throws DomainError off the interior (boundary points are
  /// errors, not clamps: iterates must stay interior by construction).
  Vec gradient(const Vec& x) const;

  /// grad f*(s); defined for every s, lands strictly inside dom f.
  Vec conjugate_gradient(const Vec& s) const;

  /// Coordinate-wise derivative of grad f* (diagonal of its Jacobian).
  Vec conjugate_gradient_derivative(const Vec& s) const;

  /// D^f(x, y) = f(x) - f(y) - <x - y, grad f(y)>; +inf when y is not
  /// interior or f(x) = +inf.  Never negative.
  BregmanValue bregman(const Vec& x, const Vec& y) const;

  /// Kernel restricted to coordinates [offset, offset+len).
  LegendreKernel slice(std::size_t offset, std::size_t len) const;

  /// (kind, p) governing a single coordinate.
  KernelSegment segment_at(std::size_t coord) const;

private:
  LegendreKernel(std::vector<KernelSegment> segments);

  std::vector<KernelSegment> segments_;
  std::size_t dim_ = 0;
};

/// Kernel of the product space: F(x, y*) = f(x) + g*(y*), blockwise.  The
/// dual kernel is stored as the kernel whose value/gradient are those of
/// g*; its conjugate gradient is therefore grad g.
class ProductKernel {
public:
  ProductKernel(LegendreKernel primal, LegendreKernel dual);

  const LegendreKernel& primal() const { return primal_; }
  const LegendreKernel& dual() const { return dual_; }
  std::size_t primal_dim() const { return primal_.dimension(); }
  std::size_t dual_dim() const { return dual_.dimension(); }

  bool is_interior(const PrimalDualPoint& z) const;
  ExtendedReal value(const PrimalDualPoint& z) const;
  PrimalDualPoint gradient(const PrimalDualPoint& z) const;
  PrimalDualPoint conjugate_gradient(const PrimalDualPoint& s) const;
  PrimalDualPoint conjugate_gradient_derivative(const PrimalDualPoint& s) const;

  /// D^F(a, b) = D^f(a.x, b.x) + D^{g*}(a.y*, b.y*).
  BregmanValue bregman(const PrimalDualPoint& a, const PrimalDualPoint& b) const;

  /// Packing into one flat vector: primal block at offset 0, dual block at
  /// offset primal_dim().
  Vec pack(const PrimalDualPoint& z) const;
  PrimalDualPoint unpack(const Vec& packed) const;

private:
  LegendreKernel primal_;
  LegendreKernel dual_;
};

/// Alias matching the operation naming of the module contract.
BregmanValue product_distance(const ProductKernel& pk, const PrimalDualPoint& a,
                              const PrimalDualPoint& b);

} // namespace bregkt
