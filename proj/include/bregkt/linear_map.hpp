#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "bregkt/vec.hpp"

namespace bregkt {

/// Dense linear map stored row-major (rows = dual-space dimension, cols =
/// primal-space dimension), with forward and adjoint application.  The
/// adjoint is transpose application, so <Lx, y*> = <x, L*y*> holds to
/// rounding.  Immutable in practice once built; applications are pure.
class LinearMap {
public:
  LinearMap() : rows_(0), cols_(0) {}
  LinearMap(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}
  /// Row-major nested initializer; every row must have the same length.
  explicit LinearMap(const std::vector<std::vector<double>>& rows);
  LinearMap(std::initializer_list<std::vector<double>> rows)
      : LinearMap(std::vector<std::vector<double>>(rows.begin(), rows.end())) {}

  static LinearMap identity(std::size_t n);
  static LinearMap zero(std::size_t rows, std::size_t cols) {
    return LinearMap(rows, cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const std::vector<double>& data() const { return a_; }

  /// y = L x  (parallel over rows; each output element is one serial inner
  /// product, so results are schedule-independent).
  Vec apply(const Vec& x) const;

  /// x = L* y  (transpose application, parallel over columns).
  Vec adjoint_apply(const Vec& y) const;

private:
  std::size_t rows_, cols_;
  std::vector<double> a_;
};

} // namespace bregkt
