#include "bregkt/linear_map.hpp"

#include <string>

#include "bregkt/errors.hpp"
#include "bregkt/parallel.hpp"

namespace bregkt {

LinearMap::LinearMap(const std::vector<std::vector<double>>& rows)
    : rows_(rows.size()), cols_(rows.empty() ? 0 : rows.front().size()) {
  a_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_)
      throw DimensionError("LinearMap: ragged row lengths");
    a_.insert(a_.end(), row.begin(), row.end());
  }
}

LinearMap LinearMap::identity(std::size_t n) {
  LinearMap m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Vec LinearMap::apply(const Vec& x) const {
  if (x.size() != cols_)
    throw DimensionError("LinearMap apply: expected dimension " +
                         std::to_string(cols_) + ", got " +
                         std::to_string(x.size()));
  Vec y(rows_, 0.0);
  par::for_each(rows_, [&](std::size_t r) {
    const double* row = a_.data() + r * cols_;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * x[c];
    y[r] = acc;
  });
  return y;
}

Vec LinearMap::adjoint_apply(const Vec& y) const {
  if (y.size() != rows_)
    throw DimensionError("LinearMap adjoint_apply: expected dimension " +
                         std::to_string(rows_) + ", got " +
                         std::to_string(y.size()));
  Vec x(cols_, 0.0);
  par::for_each(cols_, [&](std::size_t c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) acc += a_[r * cols_ + c] * y[r];
    x[c] = acc;
  });
  return x;
}

} // namespace bregkt
