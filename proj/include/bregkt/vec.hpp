#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bregkt/errors.hpp"
#include "bregkt/parallel.hpp"

namespace bregkt {

using Vec = std::vector<double>;

inline void require_same_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size())
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
}

inline double dot(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "dot");
  return par::sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

inline double norm2(const Vec& a) {
  return std::sqrt(par::sum(a.size(), [&](std::size_t i) { return a[i] * a[i]; }));
}

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

/// a + s*b
inline Vec axpy(const Vec& a, double s, const Vec& b) {
  require_same_dim(a, b, "axpy");
  Vec out(a.size());
  par::for_each(a.size(), [&](std::size_t i) { out[i] = a[i] + s * b[i]; });
  return out;
}

inline Vec sub(const Vec& a, const Vec& b) { return axpy(a, -1.0, b); }

inline Vec negate(const Vec& a) {
  Vec out(a.size());
  par::for_each(a.size(), [&](std::size_t i) { out[i] = -a[i]; });
  return out;
}

/// Paired primal vector and dual covector (x, y*) in the product space;
/// also used for product-space normals.  Packing order is always the primal
/// block first, then the dual block.
struct PrimalDualPoint {
  Vec x;
  Vec ystar;

  std::size_t primal_dim() const { return x.size(); }
  std::size_t dual_dim() const { return ystar.size(); }
};

inline void require_same_shape(const PrimalDualPoint& a,
                               const PrimalDualPoint& b, const char* what) {
  require_same_dim(a.x, b.x, what);
  require_same_dim(a.ystar, b.ystar, what);
}

inline double dot(const PrimalDualPoint& a, const PrimalDualPoint& b) {
  return dot(a.x, b.x) + dot(a.ystar, b.ystar);
}

inline double norm2(const PrimalDualPoint& a) {
  return std::sqrt(dot(a.x, a.x) + dot(a.ystar, a.ystar));
}

inline PrimalDualPoint axpy(const PrimalDualPoint& a, double s,
                            const PrimalDualPoint& b) {
  return {axpy(a.x, s, b.x), axpy(a.ystar, s, b.ystar)};
}

inline PrimalDualPoint sub(const PrimalDualPoint& a, const PrimalDualPoint& b) {
  return axpy(a, -1.0, b);
}

} // namespace bregkt
