// Benchmark of the elementwise kernel maps and reductions: serial reference
// path vs the OpenMP path, with a bitwise-equality check between the two
// (the parallel reduction combines fixed-size blocks in a fixed order, so
// results are identical, not merely close).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bregkt/kernels.hpp"
#include "bregkt/operators.hpp"
#include "bregkt/parallel.hpp"
#include "bregkt/vec.hpp"

namespace {

using bregkt::Vec;

double time_ms(const std::function<void()>& fn, int repeat) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeat; ++r) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeat;
}

bool bitwise_equal(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

struct Case {
  std::string name;
  std::function<Vec()> run;
};

void report(const Case& c, int repeat) {
  bregkt::par::set_parallel_enabled(false);
  Vec serial = c.run();
  const double t_serial = time_ms([&] { serial = c.run(); }, repeat);

  bregkt::par::set_parallel_enabled(true);
  Vec parallel = c.run();
  const double t_parallel = time_ms([&] { parallel = c.run(); }, repeat);

  const bool same = bitwise_equal(serial, parallel);
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx   %s\n", c.name.c_str(),
              t_serial, t_parallel, t_serial / t_parallel,
              same ? "bitwise-identical" : "MISMATCH");
  bregkt::par::set_parallel_enabled(true);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel benchmark of the kernel primitives"};
  std::size_t n = 1u << 22;
  int repeat = 5;
  std::uint64_t seed = 42;
  app.add_option("-n,--size", n, "vector length");
  app.add_option("--repeat", repeat, "timed repetitions per case");
  app.add_option("--seed", seed, "rng seed for the input data");
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> sym(-3.0, 3.0);
  Vec positive(n), reals(n);
  for (std::size_t i = 0; i < n; ++i) {
    positive[i] = unit(rng);
    reals[i] = sym(rng);
  }

  const auto bs = bregkt::LegendreKernel::boltzmann_shannon(n);
  const auto fd = bregkt::LegendreKernel::fermi_dirac(n);
  const auto en = bregkt::LegendreKernel::energy(n);
  const auto entropic = bregkt::MonotoneOperator::separable_uniform(
      n, bregkt::ScalarPhi{bregkt::PhiKind::Entropy, 1.0});
  const auto quad = bregkt::MonotoneOperator::separable_uniform(
      n, bregkt::ScalarPhi{bregkt::PhiKind::Quadratic, 0.7});

  std::vector<Case> cases;
  cases.push_back({"gradient (entropy kernel)", [&] { return bs.gradient(positive); }});
  cases.push_back(
      {"conjugate gradient (logistic)", [&] { return fd.conjugate_gradient(reals); }});
  cases.push_back({"bregman distance terms", [&] {
                     const auto d = bs.bregman(positive, positive);
                     return Vec{d.ieee()};
                   }});
  cases.push_back(
      {"dot reduction", [&] { return Vec{bregkt::dot(reals, reals)}; }});
  cases.push_back({"resolvent: entropic + entropy", [&] {
                     return resolvent(entropic, bs, 1.0, reals);
                   }});
  cases.push_back({"resolvent: energy + quadratic", [&] {
                     return resolvent(quad, en, 1.25, reals);
                   }});

  std::printf("%-28s %13s %13s %9s   %s\n", "case", "serial", "parallel",
              "speedup", "check");
  for (const auto& c : cases) report(c, repeat);
  return 0;
}
