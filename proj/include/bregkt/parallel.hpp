#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace bregkt::par {

/// Fixed block length of the deterministic reduction.  Partial sums are
/// formed serially within each block and combined serially in block order,
/// independent of thread count.
inline constexpr std::size_t kReduceBlock = 1024;

namespace detail {
inline bool& enabled_flag() {
  static bool enabled = true;
  return enabled;
}
inline std::size_t& grain_value() {
  static std::size_t g = 4096;
  return g;
}
inline bool use_parallel(std::size_t n) {
  return enabled_flag() && n >= grain_value();
}
} // namespace detail

/// Execution switch for the data-parallel inner loops (element-wise kernel
/// maps, separable resolvents, mat-vec rows, blocked reductions).  The
/// parallel path and the serial reference traverse indices in the same
/// order per output element and sum in the same fixed block order, so their
/// results are bitwise identical; the switch only changes the schedule.
/// Not meant to be toggled concurrently with running loops.
inline bool parallel_enabled() { return detail::enabled_flag(); }
inline void set_parallel_enabled(bool on) { detail::enabled_flag() = on; }

/// Loops below this trip count always run serially (threading overhead
/// dominates at desk scale).
inline std::size_t grain() { return detail::grain_value(); }
inline void set_grain(std::size_t n) { detail::grain_value() = n; }

/// Serial reference: f(i) for i in [0, n).
template <class F>
void for_each_serial(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

/// f(i) for i in [0, n); each index is visited exactly once by one thread.
template <class F>
void for_each(std::size_t n, F&& f) {
#ifdef BREGKT_HAVE_OPENMP
  if (detail::use_parallel(n)) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      f(static_cast<std::size_t>(i));
    return;
  }
#endif
  for_each_serial(n, std::forward<F>(f));
}

/// Serial reference for sum(term(i), i in [0, n)) in the blocked order.
template <class F>
double sum_serial(std::size_t n, F&& term) {
  const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
  double total = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
    double part = 0.0;
    for (std::size_t i = lo; i < hi; ++i) part += term(i);
    total += part;
  }
  return total;
}

/// Deterministic blocked sum; bitwise equal to sum_serial for any thread
/// count because block partials are combined in block order.
template <class F>
double sum(std::size_t n, F&& term) {
#ifdef BREGKT_HAVE_OPENMP
  if (detail::use_parallel(n)) {
    const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> parts(blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
      const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
      double part = 0.0;
      for (std::size_t i = lo; i < hi; ++i) part += term(i);
      parts[static_cast<std::size_t>(b)] = part;
    }
    double total = 0.0;
    for (double p : parts) total += p;
    return total;
  }
#endif
  return sum_serial(n, std::forward<F>(term));
}

} // namespace bregkt::par
