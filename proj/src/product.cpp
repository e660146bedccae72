#include "bregkt/product.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "bregkt/errors.hpp"

namespace bregkt {

CompositeProblem assemble(const BlockProblem& bp) {
  const std::size_t m = bp.primal.size();
  const std::size_t p = bp.dual.size();
  if (m == 0 || p == 0)
    throw ValidationError("block problem needs at least one primal and one dual block");
  if (bp.coupling.size() != p)
    throw DimensionError("block problem: coupling must have one row per dual block");
  for (std::size_t k = 0; k < p; ++k)
    if (bp.coupling[k].size() != m)
      throw DimensionError("block problem: coupling row " + std::to_string(k) +
                           " must have one entry per primal block");

  std::vector<MonotoneOperator> a_parts, b_parts;
  std::vector<LegendreKernel> f_parts, h_parts, g_parts, j_parts;
  Vec x0, y0;
  double epsilon = 0.0, delta = 0.0;
  std::size_t nx = 0, ny = 0;

  for (std::size_t i = 0; i < m; ++i) {
    const auto& blk = bp.primal[i];
    const std::size_t d = blk.op.dimension();
    if (blk.f.dimension() != d || blk.h.dimension() != d ||
        blk.x0.size() != d)
      throw DimensionError("primal block " + std::to_string(i) +
                           ": operator, kernels and start must share a dimension");
    if (!(blk.epsilon > 0.0))
      throw ValidationError("primal block " + std::to_string(i) +
                            ": epsilon must be positive");
    a_parts.push_back(blk.op);
    f_parts.push_back(blk.f);
    h_parts.push_back(blk.h);
    x0.insert(x0.end(), blk.x0.begin(), blk.x0.end());
    epsilon = std::max(epsilon, blk.epsilon);
    nx += d;
  }
  for (std::size_t k = 0; k < p; ++k) {
    const auto& blk = bp.dual[k];
    const std::size_t d = blk.op.dimension();
    if (blk.gstar.dimension() != d || blk.j.dimension() != d ||
        blk.ystar0.size() != d)
      throw DimensionError("dual block " + std::to_string(k) +
                           ": operator, kernels and start must share a dimension");
    if (!(blk.delta > 0.0))
      throw ValidationError("dual block " + std::to_string(k) +
                            ": delta must be positive");
    b_parts.push_back(blk.op);
    g_parts.push_back(blk.gstar);
    j_parts.push_back(blk.j);
    y0.insert(y0.end(), blk.ystar0.begin(), blk.ystar0.end());
    delta = std::max(delta, blk.delta);
    ny += d;
  }

  LinearMap L(ny, nx);
  std::size_t row_off = 0;
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t rows = bp.dual[k].op.dimension();
    std::size_t col_off = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t cols = bp.primal[i].op.dimension();
      const LinearMap& blk = bp.coupling[k][i];
      if (blk.rows() != rows || blk.cols() != cols)
        throw DimensionError("coupling block (" + std::to_string(k) + "," +
                             std::to_string(i) + ") has shape " +
                             std::to_string(blk.rows()) + "x" +
                             std::to_string(blk.cols()) + ", expected " +
                             std::to_string(rows) + "x" + std::to_string(cols));
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
          L.at(row_off + r, col_off + c) = blk.at(r, c);
      col_off += cols;
    }
    row_off += rows;
  }

  return CompositeProblem{MonotoneOperator::block_diagonal(std::move(a_parts)),
                          MonotoneOperator::block_diagonal(std::move(b_parts)),
                          std::move(L),
                          LegendreKernel::concat(f_parts),
                          LegendreKernel::concat(g_parts),
                          LegendreKernel::concat(h_parts),
                          LegendreKernel::concat(j_parts),
                          epsilon,
                          delta,
                          bp.sigma,
                          PrimalDualPoint{std::move(x0), std::move(y0)}};
}

BlockSolveReport solve_blocks(const BlockProblem& bp,
                              const StepSchedule& schedule,
                              const SolverOptions& opts) {
  const CompositeProblem cp = assemble(bp);
  BlockSolveReport out{solve(cp, schedule, opts), {}, {}};
  std::size_t off = 0;
  for (const auto& blk : bp.primal) {
    const std::size_t d = blk.op.dimension();
    out.x_blocks.emplace_back(out.report.final.x.begin() + off,
                              out.report.final.x.begin() + off + d);
    off += d;
  }
  off = 0;
  for (const auto& blk : bp.dual) {
    const std::size_t d = blk.op.dimension();
    out.ystar_blocks.emplace_back(out.report.final.ystar.begin() + off,
                                  out.report.final.ystar.begin() + off + d);
    off += d;
  }
  return out;
}

} // namespace bregkt
