#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "bregkt/product.hpp"
#include "bregkt/solver.hpp"

namespace bregkt {

/// A problem file: the problem itself (flat or block form) plus the
/// schedule and solver options it declares.  The monostate alternative only
/// marks a default-constructed (not yet parsed) value.
struct ParsedProblem {
  std::variant<std::monostate, CompositeProblem, BlockProblem> problem;
  StepSchedule schedule = StepSchedule::constant();
  SolverOptions options;

  bool is_blocks() const {
    return std::holds_alternative<BlockProblem>(problem);
  }
  /// The flat problem (assembling the block form when necessary).
  CompositeProblem composite() const;
};

/// Parses a JSON problem document (schema in docs/schema.md).  Throws
/// ParseError with a field-path diagnostic on schema violations; semantic
/// violations (boundary start point, indefinite matrices, ...) surface as
/// the construction errors of the violated component.
ParsedProblem parse_problem_text(const std::string& text,
                                 const std::string& origin = "<memory>");

/// Reads and parses a file; throws ParseError when unreadable.
ParsedProblem parse_problem(const std::string& path);

/// Canonical JSON form; parse_problem_text(emit_problem(p)) reproduces the
/// same problem (round-trip idempotence).
std::string emit_problem(const ParsedProblem& p);

/// CSV trace: header "n,gamma,mu,kt_residual,d_full,d_half" plus
/// ",x0,...,ystar0,..." when rows carry vectors; numbers at 17 significant
/// digits.  The vectors are the post-step iterate of each row.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

/// printf-style %.17g formatting used for all emitted floating point.
std::string format17(double v);

/// Full command-line entry point (verbs solve / verify / trace); returns
/// the process exit code: 0 converged (or verify agreed), 1 verify
/// mismatch, 2 iteration budget exhausted, 3 input error, 4 numerical
/// failure.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

} // namespace bregkt
