#include "bregkt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bregkt/errors.hpp"
#include "bregkt/parallel.hpp"

namespace bregkt {

namespace scalar_kernel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Interval interior_interval(KernelKind k) {
  switch (k) {
    case KernelKind::Energy:
    case KernelKind::PPower: return {-kInf, kInf};
    case KernelKind::BoltzmannShannon: return {0.0, kInf};
    case KernelKind::FermiDirac: return {0.0, 1.0};
    case KernelKind::Hellinger: return {-1.0, 1.0};
  }
  return {-kInf, kInf};
}

bool interior(KernelKind k, double xi) {
  const Interval iv = interior_interval(k);
  return xi > iv.lo && xi < iv.hi;
}

double value(KernelKind k, double p, double xi) {
  switch (k) {
    case KernelKind::Energy:
      return 0.5 * xi * xi;
    case KernelKind::BoltzmannShannon:
      if (xi < 0.0) return kInf;
      if (xi == 0.0) return 0.0;
      return xi * std::log(xi) - xi;
    case KernelKind::FermiDirac:
      if (xi < 0.0 || xi > 1.0) return kInf;
      if (xi == 0.0 || xi == 1.0) return 0.0;
      return xi * std::log(xi) + (1.0 - xi) * std::log1p(-xi);
    case KernelKind::Hellinger: {
      const double r = 1.0 - xi * xi;
      if (r < 0.0) return kInf;
      return -std::sqrt(r);
    }
    case KernelKind::PPower:
      return std::pow(std::fabs(xi), p) / p;
  }
  return kInf;
}

double grad(KernelKind k, double p, double xi) {
  switch (k) {
    case KernelKind::Energy: return xi;
    case KernelKind::BoltzmannShannon: return std::log(xi);
    case KernelKind::FermiDirac: return std::log(xi) - std::log1p(-xi);
    case KernelKind::Hellinger: return xi / std::sqrt(1.0 - xi * xi);
    case KernelKind::PPower:
      return std::copysign(std::pow(std::fabs(xi), p - 1.0), xi);
  }
  return 0.0;
}

double grad_deriv(KernelKind k, double p, double xi) {
  switch (k) {
    case KernelKind::Energy: return 1.0;
    case KernelKind::BoltzmannShannon: return 1.0 / xi;
    case KernelKind::FermiDirac: return 1.0 / (xi * (1.0 - xi));
    case KernelKind::Hellinger: {
      const double r = 1.0 - xi * xi;
      return 1.0 / (r * std::sqrt(r));
    }
    case KernelKind::PPower:
      return (p - 1.0) * std::pow(std::fabs(xi), p - 2.0);
  }
  return 1.0;
}

double conj_grad(KernelKind k, double p, double s) {
  switch (k) {
    case KernelKind::Energy: return s;
    case KernelKind::BoltzmannShannon:
      // exp underflows to 0 for s < -745; keep the value strictly positive.
      return std::max(std::exp(s), std::numeric_limits<double>::min());
    case KernelKind::FermiDirac: {
      // Logistic, evaluated without overflow on either tail and clamped into
      // the open unit interval: the kernel's gradient is finite only there,
      // and a huge |s| would otherwise round the value onto the boundary.
      double v;
      if (s >= 0.0) {
        v = 1.0 / (1.0 + std::exp(-s));
      } else {
        const double e = std::exp(s);
        v = e / (1.0 + e);
      }
      return std::clamp(v, std::numeric_limits<double>::min(),
                        std::nextafter(1.0, 0.0));
    }
    case KernelKind::Hellinger: {
      // Clamped into the open interval (-1, 1) for the same reason.
      const double lim = std::nextafter(1.0, 0.0);
      return std::clamp(s / std::hypot(1.0, s), -lim, lim);
    }
    case KernelKind::PPower:
      return std::copysign(std::pow(std::fabs(s), 1.0 / (p - 1.0)), s);
  }
  return s;
}

double conj_grad_deriv(KernelKind k, double p, double s) {
  switch (k) {
    case KernelKind::Energy: return 1.0;
    case KernelKind::BoltzmannShannon: return std::exp(s);
    case KernelKind::FermiDirac: {
      const double e = std::exp(-std::fabs(s));
      const double d = 1.0 + e;
      return e / (d * d);
    }
    case KernelKind::Hellinger: {
      const double h = std::hypot(1.0, s);
      return 1.0 / (h * h * h);
    }
    case KernelKind::PPower:
      return std::pow(std::fabs(s), (2.0 - p) / (p - 1.0)) / (p - 1.0);
  }
  return 1.0;
}

} // namespace scalar_kernel

namespace {

void check_dim(std::size_t have, std::size_t want, const char* what) {
  if (have != want)
    throw DimensionError(std::string(what) + ": expected dimension " +
                         std::to_string(want) + ", got " +
                         std::to_string(have));
}

/// One-coordinate Bregman term value(x) - value(y) - (x-y) grad(y),
/// clamped at zero: each term is a one-dimensional Bregman distance, so
/// negatives can only be rounding noise.
double bregman_term(KernelKind k, double p, double xi, double yi) {
  const double vx = scalar_kernel::value(k, p, xi);
  if (!std::isfinite(vx)) return vx;
  const double term = vx - scalar_kernel::value(k, p, yi) -
                      (xi - yi) * scalar_kernel::grad(k, p, yi);
  return std::max(term, 0.0);
}

} // namespace

LegendreKernel::LegendreKernel(std::vector<KernelSegment> segments)
    : segments_(std::move(segments)) {
  for (const auto& s : segments_) {
    if (s.dim == 0) throw ValidationError("kernel segment of dimension 0");
    if (s.kind == KernelKind::PPower && !(s.p > 1.0))
      throw ValidationError("p_power kernel requires p > 1");
    dim_ += s.dim;
  }
  if (dim_ == 0) throw ValidationError("kernel of dimension 0");
}

LegendreKernel LegendreKernel::energy(std::size_t dim) {
  return LegendreKernel({{KernelKind::Energy, 0.0, dim}});
}
LegendreKernel LegendreKernel::boltzmann_shannon(std::size_t dim) {
  return LegendreKernel({{KernelKind::BoltzmannShannon, 0.0, dim}});
}
LegendreKernel LegendreKernel::fermi_dirac(std::size_t dim) {
  return LegendreKernel({{KernelKind::FermiDirac, 0.0, dim}});
}
LegendreKernel LegendreKernel::hellinger(std::size_t dim) {
  return LegendreKernel({{KernelKind::Hellinger, 0.0, dim}});
}
LegendreKernel LegendreKernel::p_power(std::size_t dim, double p) {
  return LegendreKernel({{KernelKind::PPower, p, dim}});
}

LegendreKernel LegendreKernel::concat(const std::vector<LegendreKernel>& parts) {
  std::vector<KernelSegment> segs;
  for (const auto& part : parts)
    segs.insert(segs.end(), part.segments_.begin(), part.segments_.end());
  return LegendreKernel(std::move(segs));
}

bool LegendreKernel::uniform(KernelKind k) const {
  return std::all_of(segments_.begin(), segments_.end(),
                     [&](const KernelSegment& s) { return s.kind == k; });
}

bool LegendreKernel::is_interior(const Vec& x) const {
  check_dim(x.size(), dim_, "kernel is_interior");
  std::size_t off = 0;
  for (const auto& seg : segments_) {
    for (std::size_t i = 0; i < seg.dim; ++i)
      if (!scalar_kernel::interior(seg.kind, x[off + i])) return false;
    off += seg.dim;
  }
  return true;
}

ExtendedReal LegendreKernel::value(const Vec& x) const {
  check_dim(x.size(), dim_, "kernel value");
  double total = 0.0;
  std::size_t off = 0;
  for (const auto& seg : segments_) {
    total += par::sum(seg.dim, [&](std::size_t i) {
      return scalar_kernel::value(seg.kind, seg.p, x[off + i]);
    });
    off += seg.dim;
  }
  return ExtendedReal::from_ieee(total);
}

Vec LegendreKernel::gradient(const Vec& x) const {
  check_dim(x.size(), dim_, "kernel gradient");
  if (!is_interior(x))
    throw DomainError("kernel gradient: point not in the interior domain");
  Vec out(dim_);
  std::size_t off = 0;
  for (const auto& seg : segments_) {
    par::for_each(seg.dim, [&](std::size_t i) {
      out[off + i] = scalar_kernel::grad(seg.kind, seg.p, x[off + i]);
    });
    off += seg.dim;
  }
  return out;
}

Vec LegendreKernel::conjugate_gradient(const Vec& s) const {
  check_dim(s.size(), dim_, "kernel conjugate_gradient");
  Vec out(dim_);
  std::size_t off = 0;
  for (const auto& seg : segments_) {
    par::for_each(seg.dim, [&](std::size_t i) {
      out[off + i] = scalar_kernel::conj_grad(seg.kind, seg.p, s[off + i]);
    });
    off += seg.dim;
  }
  return out;
}

Vec LegendreKernel::conjugate_gradient_derivative(const Vec& s) const {
  check_dim(s.size(), dim_, "kernel conjugate_gradient_derivative");
  Vec out(dim_);
  std::size_t off = 0;
  for (const auto& seg : segments_) {
    par::for_each(seg.dim, [&](std::size_t i) {
      out[off + i] = scalar_kernel::conj_grad_deriv(seg.kind, seg.p, s[off + i]);
    });
    off += seg.dim;
  }
  return out;
}

BregmanValue LegendreKernel::bregman(const Vec& x, const Vec& y) const {
  check_dim(x.size(), dim_, "bregman_distance");
  check_dim(y.size(), dim_, "bregman_distance");
  if (!is_interior(y)) return ExtendedReal::infinity();
  double total = 0.0;
  std::size_t off = 0;
  for (const auto& seg : segments_) {
    total += par::sum(seg.dim, [&](std::size_t i) {
      return bregman_term(seg.kind, seg.p, x[off + i], y[off + i]);
    });
    off += seg.dim;
  }
  return ExtendedReal::from_ieee(total);
}

LegendreKernel LegendreKernel::slice(std::size_t offset, std::size_t len) const {
  if (offset + len > dim_)
    throw DimensionError("kernel slice out of range");
  std::vector<KernelSegment> segs;
  std::size_t off = 0;
  for (const auto& seg : segments_) {
    const std::size_t seg_lo = off, seg_hi = off + seg.dim;
    const std::size_t lo = std::max(seg_lo, offset);
    const std::size_t hi = std::min(seg_hi, offset + len);
    if (lo < hi) segs.push_back({seg.kind, seg.p, hi - lo});
    off = seg_hi;
  }
  return LegendreKernel(std::move(segs));
}

KernelSegment LegendreKernel::segment_at(std::size_t coord) const {
  if (coord >= dim_) throw DimensionError("kernel segment_at out of range");
  std::size_t off = 0;
  for (const auto& seg : segments_) {
    if (coord < off + seg.dim) return seg;
    off += seg.dim;
  }
  return segments_.back();
}

ProductKernel::ProductKernel(LegendreKernel primal, LegendreKernel dual)
    : primal_(std::move(primal)), dual_(std::move(dual)) {}

bool ProductKernel::is_interior(const PrimalDualPoint& z) const {
  return primal_.is_interior(z.x) && dual_.is_interior(z.ystar);
}

ExtendedReal ProductKernel::value(const PrimalDualPoint& z) const {
  return primal_.value(z.x) + dual_.value(z.ystar);
}

PrimalDualPoint ProductKernel::gradient(const PrimalDualPoint& z) const {
  return {primal_.gradient(z.x), dual_.gradient(z.ystar)};
}

PrimalDualPoint ProductKernel::conjugate_gradient(const PrimalDualPoint& s) const {
  return {primal_.conjugate_gradient(s.x), dual_.conjugate_gradient(s.ystar)};
}

PrimalDualPoint ProductKernel::conjugate_gradient_derivative(
    const PrimalDualPoint& s) const {
  return {primal_.conjugate_gradient_derivative(s.x),
          dual_.conjugate_gradient_derivative(s.ystar)};
}

BregmanValue ProductKernel::bregman(const PrimalDualPoint& a,
                                    const PrimalDualPoint& b) const {
  return primal_.bregman(a.x, b.x) + dual_.bregman(a.ystar, b.ystar);
}

Vec ProductKernel::pack(const PrimalDualPoint& z) const {
  check_dim(z.x.size(), primal_dim(), "pack");
  check_dim(z.ystar.size(), dual_dim(), "pack");
  Vec out;
  out.reserve(primal_dim() + dual_dim());
  out.insert(out.end(), z.x.begin(), z.x.end());
  out.insert(out.end(), z.ystar.begin(), z.ystar.end());
  return out;
}

PrimalDualPoint ProductKernel::unpack(const Vec& packed) const {
  check_dim(packed.size(), primal_dim() + dual_dim(), "unpack");
  return {Vec(packed.begin(), packed.begin() + primal_dim()),
          Vec(packed.begin() + primal_dim(), packed.end())};
}

BregmanValue product_distance(const ProductKernel& pk, const PrimalDualPoint& a,
                              const PrimalDualPoint& b) {
  return pk.bregman(a, b);
}

} // namespace bregkt
