#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bregkt/errors.hpp"
#include "bregkt/io.hpp"
#include "bregkt/oracle.hpp"

namespace bregkt {

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitMaxIters = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumerical = 4;

struct CliConfig {
  std::string file;
  std::optional<std::size_t> max_iter;
  std::optional<double> tol;
  std::optional<double> gamma;
  std::optional<double> mu;
  std::string trace_out;
  bool full_vectors = false;
  std::uint64_t seed = 1234;
};

void add_common_flags(CLI::App* sub, CliConfig& cfg) {
  sub->add_option("file", cfg.file, "problem file (JSON)")->required();
  sub->add_option("--max-iter", cfg.max_iter, "iteration budget override");
  sub->add_option("--tol", cfg.tol, "stopping tolerance override");
  sub->add_option("--gamma", cfg.gamma, "constant primal step size override");
  sub->add_option("--mu", cfg.mu, "constant dual step size override");
  sub->add_option("--trace-out", cfg.trace_out, "write the iteration trace CSV here");
  sub->add_flag("--full-vectors", cfg.full_vectors,
                "include full iterate vectors in the trace");
  sub->add_option("--seed", cfg.seed,
                  "seed for randomized components (oracle restarts)");
}

void apply_overrides(const CliConfig& cfg, ParsedProblem& pp) {
  if (cfg.max_iter) pp.options.max_iters = *cfg.max_iter;
  if (cfg.tol) pp.options.tol = *cfg.tol;
  if (cfg.gamma || cfg.mu) {
    std::vector<double> gammas = pp.schedule.gammas();
    std::vector<double> mus = pp.schedule.mus();
    if (cfg.gamma) gammas = {*cfg.gamma};
    if (cfg.mu) mus = {*cfg.mu};
    pp.schedule = StepSchedule::cyclic(std::move(gammas), std::move(mus));
  }
  if (cfg.full_vectors) pp.options.trace_vectors = true;
}

void print_point(std::ostream& os, const PrimalDualPoint& z) {
  os << "x = [";
  for (std::size_t i = 0; i < z.x.size(); ++i)
    os << (i ? ", " : "") << format17(z.x[i]);
  os << "]\nystar = [";
  for (std::size_t i = 0; i < z.ystar.size(); ++i)
    os << (i ? ", " : "") << format17(z.ystar[i]);
  os << "]\n";
}

int exit_code_for(const SolveReport& rep) {
  switch (rep.reason) {
    case TerminationReason::MaxIters: return kExitMaxIters;
    case TerminationReason::NumericalFailure: return kExitNumerical;
    default: return kExitConverged;
  }
}

bool write_trace(const CliConfig& cfg, const SolveReport& rep,
                 bool default_stdout) {
  if (!cfg.trace_out.empty()) {
    std::ofstream out(cfg.trace_out);
    if (!out) {
      std::cerr << "error: cannot open trace output '" << cfg.trace_out
                << "'\n";
      return false;
    }
    write_trace_csv(out, rep.trace);
    return true;
  }
  if (default_stdout) write_trace_csv(std::cout, rep.trace);
  return true;
}

void print_summary(std::ostream& os, const SolveReport& rep) {
  os << "termination: " << to_string(rep.reason) << "\n"
     << "iterations:  " << rep.iterations << "\n";
  if (rep.solution_from_graph)
    os << "note: solution certified from the resolvent graph pair\n";
  if (!rep.message.empty()) os << "detail: " << rep.message << "\n";
  print_point(os, rep.final);
}

int run_solve(const CliConfig& cfg, bool trace_mode) {
  ParsedProblem pp;
  std::optional<CompositeProblem> cp;
  try {
    pp = parse_problem(cfg.file);
    apply_overrides(cfg, pp);
    cp = pp.composite();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  SolveReport rep;
  try {
    rep = solve(*cp, pp.schedule, pp.options);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput; // validation failures precede the iteration loop
  }

  std::ostream& summary = trace_mode ? std::cerr : std::cout;
  print_summary(summary, rep);
  if (rep.reason == TerminationReason::NumericalFailure)
    std::cerr << "numerical failure: " << rep.message << "\n";
  if (!write_trace(cfg, rep, trace_mode)) return kExitInput;
  return exit_code_for(rep);
}

int run_verify(const CliConfig& cfg) {
  ParsedProblem pp;
  std::optional<CompositeProblem> cp;
  try {
    pp = parse_problem(cfg.file);
    apply_overrides(cfg, pp);
    cp = pp.composite();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  SolveReport rep;
  PrimalDualPoint reference;
  try {
    rep = solve(*cp, pp.schedule, pp.options);
    const KTDescription Z = kt_set_affine(*cp);
    if (Z.kind == KTDescription::Kind::Empty) {
      std::cerr << "error: the target set of this problem is empty\n";
      return kExitInput;
    }
    reference =
        best_approx_bruteforce(cp->product_kernel(), Z, cp->start, cfg.seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (!rep.converged()) {
    std::cerr << "solver did not converge: " << to_string(rep.reason) << "\n";
    print_summary(std::cout, rep);
    return exit_code_for(rep);
  }

  double diff = 0.0;
  for (std::size_t i = 0; i < rep.final.x.size(); ++i)
    diff = std::max(diff, std::fabs(rep.final.x[i] - reference.x[i]));
  for (std::size_t i = 0; i < rep.final.ystar.size(); ++i)
    diff = std::max(diff, std::fabs(rep.final.ystar[i] - reference.ystar[i]));

  std::cout << "solver result:\n";
  print_point(std::cout, rep.final);
  std::cout << "reference best approximation:\n";
  print_point(std::cout, reference);
  std::cout << "max coordinate difference: " << format17(diff) << "\n";
  if (!write_trace(cfg, rep, false)) return kExitInput;
  if (diff <= 1e-5) {
    std::cout << "verify: agreement within 1e-5\n";
    return kExitConverged;
  }
  std::cout << "verify: MISMATCH beyond 1e-5\n";
  return kExitMismatch;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "bregkt: best Bregman approximation to a reference pair from the "
      "Kuhn-Tucker set of a composite monotone inclusion"};
  app.require_subcommand(1);

  CliConfig cfg;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "run the solver and print the final pair");
  add_common_flags(solve_cmd, cfg);
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "solve, then cross-check against the direct reference solver");
  add_common_flags(verify_cmd, cfg);
  CLI::App* trace_cmd = app.add_subcommand(
      "trace", "solve and write the per-iteration CSV (stdout by default)");
  add_common_flags(trace_cmd, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (solve_cmd->parsed()) return run_solve(cfg, false);
  if (verify_cmd->parsed()) return run_verify(cfg);
  return run_solve(cfg, true);
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace bregkt
