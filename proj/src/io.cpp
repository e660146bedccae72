#include "bregkt/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "bregkt/errors.hpp"

namespace bregkt {

using nlohmann::json;

namespace {

// --------------------------------------------------------------------------
// Parse helpers with field-path diagnostics
// --------------------------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const json& field(const json& obj, const char* name, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(name);
  if (it == obj.end()) fail(path + "." + name, "missing required field");
  return *it;
}

const json* optional_field(const json& obj, const char* name) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(name);
  return it == obj.end() ? nullptr : &*it;
}

double number_of(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::size_t size_of(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::string string_of(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Vec vector_of(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  Vec out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number_of(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

LinearMap matrix_of(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of rows");
  std::vector<Vec> rows;
  for (std::size_t r = 0; r < v.size(); ++r)
    rows.push_back(vector_of(v[r], path + "[" + std::to_string(r) + "]"));
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != rows[0].size()) fail(path, "ragged matrix rows");
  if (rows.empty()) fail(path, "matrix needs at least one row");
  return LinearMap(rows);
}

// --------------------------------------------------------------------------
// Kernels
// --------------------------------------------------------------------------

LegendreKernel kernel_of(const json& v, const std::string& path) {
  const std::string kind = string_of(field(v, "kind", path), path + ".kind");
  if (kind == "concat") {
    const json& parts = field(v, "parts", path);
    if (!parts.is_array() || parts.empty())
      fail(path + ".parts", "expected a nonempty array of kernels");
    std::vector<LegendreKernel> ks;
    for (std::size_t i = 0; i < parts.size(); ++i)
      ks.push_back(
          kernel_of(parts[i], path + ".parts[" + std::to_string(i) + "]"));
    return LegendreKernel::concat(ks);
  }
  const std::size_t dim = size_of(field(v, "dim", path), path + ".dim");
  if (kind == "energy") return LegendreKernel::energy(dim);
  if (kind == "boltzmann_shannon") return LegendreKernel::boltzmann_shannon(dim);
  if (kind == "fermi_dirac") return LegendreKernel::fermi_dirac(dim);
  if (kind == "hellinger") return LegendreKernel::hellinger(dim);
  if (kind == "p_power")
    return LegendreKernel::p_power(dim,
                                   number_of(field(v, "p", path), path + ".p"));
  fail(path + ".kind", "unknown kernel kind '" + kind + "'");
}

json kernel_to_json(const LegendreKernel& k) {
  const auto seg_json = [](const KernelSegment& s) {
    json o;
    switch (s.kind) {
      case KernelKind::Energy: o["kind"] = "energy"; break;
      case KernelKind::BoltzmannShannon: o["kind"] = "boltzmann_shannon"; break;
      case KernelKind::FermiDirac: o["kind"] = "fermi_dirac"; break;
      case KernelKind::Hellinger: o["kind"] = "hellinger"; break;
      case KernelKind::PPower:
        o["kind"] = "p_power";
        o["p"] = s.p;
        break;
    }
    o["dim"] = s.dim;
    return o;
  };
  if (k.segments().size() == 1) return seg_json(k.segments()[0]);
  json parts = json::array();
  for (const auto& s : k.segments()) parts.push_back(seg_json(s));
  return json{{"kind", "concat"}, {"parts", parts}};
}

// --------------------------------------------------------------------------
// Operators
// --------------------------------------------------------------------------

ScalarPhi phi_of(const json& v, const std::string& path) {
  const std::string kind = string_of(field(v, "kind", path), path + ".kind");
  if (kind == "entropy")
    return {PhiKind::Entropy,
            number_of(field(v, "omega", path), path + ".omega")};
  if (kind == "power")
    return {PhiKind::Power, number_of(field(v, "p", path), path + ".p")};
  if (kind == "inverse_power")
    return {PhiKind::InversePower, number_of(field(v, "p", path), path + ".p")};
  if (kind == "neg_power")
    return {PhiKind::NegPower, number_of(field(v, "p", path), path + ".p")};
  if (kind == "quadratic")
    return {PhiKind::Quadratic, number_of(field(v, "c", path), path + ".c")};
  if (kind == "co_entropy") return {PhiKind::CoEntropy, 0.0};
  fail(path + ".kind", "unknown phi kind '" + kind + "'");
}

json phi_to_json(const ScalarPhi& phi) {
  switch (phi.kind) {
    case PhiKind::Entropy: return {{"kind", "entropy"}, {"omega", phi.param}};
    case PhiKind::Power: return {{"kind", "power"}, {"p", phi.param}};
    case PhiKind::InversePower:
      return {{"kind", "inverse_power"}, {"p", phi.param}};
    case PhiKind::NegPower: return {{"kind", "neg_power"}, {"p", phi.param}};
    case PhiKind::Quadratic: return {{"kind", "quadratic"}, {"c", phi.param}};
    case PhiKind::CoEntropy: return {{"kind", "co_entropy"}};
  }
  return {};
}

MonotoneOperator op_of(const json& v, const std::string& path) {
  const std::string kind = string_of(field(v, "kind", path), path + ".kind");
  if (kind == "zero")
    return MonotoneOperator::zero(
        size_of(field(v, "dim", path), path + ".dim"));
  if (kind == "separable") {
    const json& phis = field(v, "phis", path);
    if (!phis.is_array() || phis.empty())
      fail(path + ".phis", "expected a nonempty array of phi specs");
    std::vector<ScalarPhi> out;
    for (std::size_t i = 0; i < phis.size(); ++i)
      out.push_back(phi_of(phis[i], path + ".phis[" + std::to_string(i) + "]"));
    return MonotoneOperator::separable(std::move(out));
  }
  if (kind == "matched_kernel")
    return MonotoneOperator::matched_kernel(
        size_of(field(v, "dim", path), path + ".dim"));
  if (kind == "skew2x2")
    return MonotoneOperator::skew2x2(
        number_of(field(v, "beta", path), path + ".beta"));
  if (kind == "affine")
    return MonotoneOperator::affine(
        matrix_of(field(v, "M", path), path + ".M"),
        vector_of(field(v, "q", path), path + ".q"));
  if (kind == "block_diagonal") {
    const json& parts = field(v, "parts", path);
    if (!parts.is_array() || parts.empty())
      fail(path + ".parts", "expected a nonempty array of operators");
    std::vector<MonotoneOperator> ops;
    for (std::size_t i = 0; i < parts.size(); ++i)
      ops.push_back(
          op_of(parts[i], path + ".parts[" + std::to_string(i) + "]"));
    return MonotoneOperator::block_diagonal(std::move(ops));
  }
  fail(path + ".kind", "unknown operator kind '" + kind + "'");
}

json matrix_to_json(const LinearMap& M) {
  json rows = json::array();
  for (std::size_t r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < M.cols(); ++c) row.push_back(M.at(r, c));
    rows.push_back(row);
  }
  return rows;
}

json op_to_json(const MonotoneOperator& op) {
  const auto block_json = [](const MonotoneOperator::Block& b) {
    json o;
    switch (b.kind) {
      case MonotoneOperator::Kind::Zero:
        o["kind"] = "zero";
        o["dim"] = b.dim;
        break;
      case MonotoneOperator::Kind::Separable: {
        o["kind"] = "separable";
        json phis = json::array();
        for (const auto& phi : b.phis) phis.push_back(phi_to_json(phi));
        o["phis"] = phis;
        break;
      }
      case MonotoneOperator::Kind::MatchedKernel:
        o["kind"] = "matched_kernel";
        o["dim"] = b.dim;
        break;
      case MonotoneOperator::Kind::Skew2x2:
        o["kind"] = "skew2x2";
        o["beta"] = b.beta;
        break;
      case MonotoneOperator::Kind::Affine:
        o["kind"] = "affine";
        o["M"] = matrix_to_json(b.M);
        o["q"] = b.q;
        break;
    }
    return o;
  };
  if (op.blocks().size() == 1) return block_json(op.blocks()[0]);
  json parts = json::array();
  for (const auto& b : op.blocks()) parts.push_back(block_json(b));
  return json{{"kind", "block_diagonal"}, {"parts", parts}};
}

// --------------------------------------------------------------------------
// Schedule / options / problems
// --------------------------------------------------------------------------

std::vector<double> rate_list(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) {
    if (v.empty()) fail(path, "schedule list must be nonempty");
    return vector_of(v, path);
  }
  fail(path, "expected a number or an array of numbers");
}

StepSchedule schedule_of(const json* v, const std::string& path) {
  std::vector<double> gammas{1.0}, mus{1.0};
  if (v) {
    if (const json* g = optional_field(*v, "gamma"))
      gammas = rate_list(*g, path + ".gamma");
    if (const json* m = optional_field(*v, "mu"))
      mus = rate_list(*m, path + ".mu");
  }
  return StepSchedule::cyclic(std::move(gammas), std::move(mus));
}

SolverOptions options_of(const json* v, const std::string& path) {
  SolverOptions opts;
  if (v) {
    if (const json* mi = optional_field(*v, "max_iters"))
      opts.max_iters = size_of(*mi, path + ".max_iters");
    if (const json* tol = optional_field(*v, "tol"))
      opts.tol = number_of(*tol, path + ".tol");
    if (const json* tv = optional_field(*v, "trace_vectors")) {
      if (!tv->is_boolean())
        fail(path + ".trace_vectors", "expected a boolean");
      opts.trace_vectors = tv->get<bool>();
    }
  }
  return opts;
}

CompositeProblem composite_of(const json& doc, const std::string& path) {
  const json& kernels = field(doc, "kernels", path);
  const json& operators = field(doc, "operators", path);
  CompositeProblem cp{
      op_of(field(operators, "A", path + ".operators"),
            path + ".operators.A"),
      op_of(field(operators, "B", path + ".operators"),
            path + ".operators.B"),
      matrix_of(field(doc, "L", path), path + ".L"),
      kernel_of(field(kernels, "f", path + ".kernels"), path + ".kernels.f"),
      kernel_of(field(kernels, "gstar", path + ".kernels"),
                path + ".kernels.gstar"),
      kernel_of(field(kernels, "h", path + ".kernels"), path + ".kernels.h"),
      kernel_of(field(kernels, "j", path + ".kernels"), path + ".kernels.j"),
      0.5,
      0.5,
      2.0,
      {}};
  if (const json* e = optional_field(doc, "epsilon"))
    cp.epsilon = number_of(*e, path + ".epsilon");
  if (const json* d = optional_field(doc, "delta"))
    cp.delta = number_of(*d, path + ".delta");
  if (const json* s = optional_field(doc, "sigma"))
    cp.sigma = number_of(*s, path + ".sigma");
  const json& start = field(doc, "start", path);
  cp.start.x = vector_of(field(start, "x", path + ".start"), path + ".start.x");
  cp.start.ystar =
      vector_of(field(start, "ystar", path + ".start"), path + ".start.ystar");
  cp.validate();
  return cp;
}

BlockProblem blocks_of(const json& doc, const std::string& path) {
  BlockProblem bp;
  const json& primal = field(doc, "primal_blocks", path);
  if (!primal.is_array() || primal.empty())
    fail(path + ".primal_blocks", "expected a nonempty array");
  for (std::size_t i = 0; i < primal.size(); ++i) {
    const std::string bpath = path + ".primal_blocks[" + std::to_string(i) + "]";
    const json& b = primal[i];
    PrimalBlock blk{op_of(field(b, "op", bpath), bpath + ".op"),
                    kernel_of(field(b, "f", bpath), bpath + ".f"),
                    kernel_of(field(b, "h", bpath), bpath + ".h"),
                    vector_of(field(b, "x0", bpath), bpath + ".x0"), 0.5};
    if (const json* e = optional_field(b, "epsilon"))
      blk.epsilon = number_of(*e, bpath + ".epsilon");
    bp.primal.push_back(std::move(blk));
  }
  const json& dual = field(doc, "dual_blocks", path);
  if (!dual.is_array() || dual.empty())
    fail(path + ".dual_blocks", "expected a nonempty array");
  for (std::size_t k = 0; k < dual.size(); ++k) {
    const std::string bpath = path + ".dual_blocks[" + std::to_string(k) + "]";
    const json& b = dual[k];
    DualBlock blk{op_of(field(b, "op", bpath), bpath + ".op"),
                  kernel_of(field(b, "gstar", bpath), bpath + ".gstar"),
                  kernel_of(field(b, "j", bpath), bpath + ".j"),
                  vector_of(field(b, "ystar0", bpath), bpath + ".ystar0"), 0.5};
    if (const json* d = optional_field(b, "delta"))
      blk.delta = number_of(*d, bpath + ".delta");
    bp.dual.push_back(std::move(blk));
  }
  const json& coupling = field(doc, "coupling", path);
  if (!coupling.is_array() || coupling.size() != bp.dual.size())
    fail(path + ".coupling", "expected one row per dual block");
  for (std::size_t k = 0; k < coupling.size(); ++k) {
    const std::string rpath = path + ".coupling[" + std::to_string(k) + "]";
    const json& row = coupling[k];
    if (!row.is_array() || row.size() != bp.primal.size())
      fail(rpath, "expected one entry per primal block");
    std::vector<LinearMap> maps;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string epath = rpath + "[" + std::to_string(i) + "]";
      if (row[i].is_null())
        maps.push_back(LinearMap::zero(bp.dual[k].op.dimension(),
                                       bp.primal[i].op.dimension()));
      else
        maps.push_back(matrix_of(row[i], epath));
    }
    bp.coupling.push_back(std::move(maps));
  }
  if (const json* s = optional_field(doc, "sigma"))
    bp.sigma = number_of(*s, path + ".sigma");
  assemble(bp).validate();
  return bp;
}

} // namespace

CompositeProblem ParsedProblem::composite() const {
  if (const auto* cp = std::get_if<CompositeProblem>(&problem)) return *cp;
  if (const auto* bp = std::get_if<BlockProblem>(&problem))
    return assemble(*bp);
  throw ValidationError("ParsedProblem::composite() on an empty value");
}

ParsedProblem parse_problem_text(const std::string& text,
                                 const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": invalid JSON: " + e.what());
  }
  const std::string path = origin;
  if (const json* v = optional_field(doc, "version")) {
    if (size_of(*v, path + ".version") != 1)
      fail(path + ".version", "unsupported version (expected 1)");
  }
  std::string kind = "composite";
  if (const json* k = optional_field(doc, "kind"))
    kind = string_of(*k, path + ".kind");

  ParsedProblem out;
  if (kind == "composite")
    out.problem = composite_of(doc, path);
  else if (kind == "blocks")
    out.problem = blocks_of(doc, path);
  else
    fail(path + ".kind", "expected 'composite' or 'blocks'");
  out.schedule = schedule_of(optional_field(doc, "schedule"), path + ".schedule");
  out.options = options_of(optional_field(doc, "solver"), path + ".solver");
  out.composite().validate_schedule(out.schedule);
  return out;
}

ParsedProblem parse_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str(), path);
}

std::string emit_problem(const ParsedProblem& p) {
  json doc;
  doc["version"] = 1;
  if (const auto* cp = std::get_if<CompositeProblem>(&p.problem)) {
    doc["kind"] = "composite";
    doc["kernels"] = {{"f", kernel_to_json(cp->f)},
                      {"gstar", kernel_to_json(cp->gstar)},
                      {"h", kernel_to_json(cp->h)},
                      {"j", kernel_to_json(cp->j)}};
    doc["operators"] = {{"A", op_to_json(cp->A)}, {"B", op_to_json(cp->B)}};
    doc["L"] = matrix_to_json(cp->L);
    doc["start"] = {{"x", cp->start.x}, {"ystar", cp->start.ystar}};
    doc["epsilon"] = cp->epsilon;
    doc["delta"] = cp->delta;
    doc["sigma"] = cp->sigma;
  } else if (const auto* bpp = std::get_if<BlockProblem>(&p.problem)) {
    const auto& bp = *bpp;
    doc["kind"] = "blocks";
    json primal = json::array();
    for (const auto& b : bp.primal) {
      json o{{"op", op_to_json(b.op)},
             {"f", kernel_to_json(b.f)},
             {"h", kernel_to_json(b.h)},
             {"x0", b.x0},
             {"epsilon", b.epsilon}};
      primal.push_back(o);
    }
    doc["primal_blocks"] = primal;
    json dual = json::array();
    for (const auto& b : bp.dual) {
      json o{{"op", op_to_json(b.op)},
             {"gstar", kernel_to_json(b.gstar)},
             {"j", kernel_to_json(b.j)},
             {"ystar0", b.ystar0},
             {"delta", b.delta}};
      dual.push_back(o);
    }
    doc["dual_blocks"] = dual;
    json coupling = json::array();
    for (const auto& row : bp.coupling) {
      json r = json::array();
      for (const auto& m : row) r.push_back(matrix_to_json(m));
      coupling.push_back(r);
    }
    doc["coupling"] = coupling;
    doc["sigma"] = bp.sigma;
  } else {
    throw ValidationError("emit_problem on an empty value");
  }
  doc["schedule"] = {{"gamma", p.schedule.gammas()}, {"mu", p.schedule.mus()}};
  doc["solver"] = {{"max_iters", p.options.max_iters},
                   {"tol", p.options.tol},
                   {"trace_vectors", p.options.trace_vectors}};
  return doc.dump(2) + "\n";
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  const bool vectors = !rows.empty() && !rows.front().x.empty();
  os << "n,gamma,mu,kt_residual,d_full,d_half";
  if (vectors) {
    for (std::size_t i = 0; i < rows.front().x.size(); ++i) os << ",x" << i;
    for (std::size_t i = 0; i < rows.front().ystar.size(); ++i)
      os << ",ystar" << i;
  }
  os << "\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format17(r.gamma) << ',' << format17(r.mu) << ','
       << format17(r.kt_residual) << ',' << format17(r.d_full) << ','
       << format17(r.d_half);
    if (vectors) {
      for (double v : r.x) os << ',' << format17(v);
      for (double v : r.ystar) os << ',' << format17(v);
    }
    os << "\n";
  }
}

} // namespace bregkt
