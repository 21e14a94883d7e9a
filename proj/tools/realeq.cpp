// realeq: solve real equation systems, translate modal formulas, check BESs.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "realeq/realeq.hpp"

using json = nlohmann::json;
using namespace realeq;

namespace {

enum Exit { kOk = 0, kParse = 1, kNotClosed = 2, kBlowup = 3, kVerify = 4, kSemantic = 5 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SolveFlags {
  std::string path;
  bool verify = false;
  bool json = false;
  bool trace = false;
  std::size_t cap = 1'000'000;
  unsigned jobs = 1;
};

json system_json(const RES& e) {
  json eqs = json::array();
  for (const Equation& eq : e.equations())
    eqs.push_back({{"op", to_string(eq.op)}, {"var", eq.lhs}, {"rhs", to_string(eq.rhs)}});
  return eqs;
}

int cmd_solve(const SolveFlags& f) {
  Options opts(f.cap);
  RES e = parse_res(read_file(f.path));
  std::vector<TraceStep> steps;
  SolvedRES sol = gauss_solve(e, opts, f.trace ? &steps : nullptr);

  std::optional<bool> verified;
  if (f.verify) {
    bool ok = true;
    ResidualReport rep = residual_check(e, sol);
    for (const ResidualRow& row : rep.rows)
      if (!row.equal) {
        ok = false;
        std::cerr << "residual: " << row.var << " = " << row.lhs << " but its right-hand side gives " << row.rhs
                  << "\n";
      }
    for (const Equation& eq : e.equations()) {
      CrosscheckReport cc = crosscheck_single(eq.op, eq.lhs, eq.rhs, 50, 1, f.jobs, opts);
      if (cc.ok()) continue;
      ok = false;
      std::cerr << "crosscheck: equation for " << eq.lhs << " disagrees with the oracle";
      if (cc.counterexample) {
        std::cerr << " at";
        for (const auto& [v, x] : cc.counterexample->valuation) std::cerr << " " << v << "=" << x;
        std::cerr << " (solver " << cc.counterexample->solver << ", oracle " << cc.counterexample->oracle << ")";
      }
      std::cerr << "\n";
    }
    verified = ok;
  }

  if (f.json) {
    json out;
    out["solution"] = json::array();
    for (const Equation& eq : e.equations())
      out["solution"].push_back({{"var", eq.lhs}, {"value", sol.at(eq.lhs).str()}});
    out["verified"] = verified ? json(*verified) : json(nullptr);
    if (f.trace) {
      out["trace"] = json::array();
      for (const TraceStep& s : steps)
        out["trace"].push_back({{"rule", s.rule}, {"note", s.note}, {"system", system_json(s.after)}});
    }
    std::cout << out.dump() << "\n";
  } else {
    if (f.trace) {
      for (std::size_t i = 0; i < steps.size(); ++i) {
        std::cout << "step " << i + 1 << " [" << steps[i].rule << "] " << steps[i].note << "\n";
        for (const Equation& eq : steps[i].after.equations())
          std::cout << "  " << to_string(eq.op) << " " << eq.lhs << " = " << to_string(eq.rhs) << ";\n";
      }
    }
    for (const Equation& eq : e.equations()) std::cout << eq.lhs << " = " << sol.at(eq.lhs) << "\n";
    if (verified) std::cout << (*verified ? "verified" : "verification failed") << "\n";
  }
  return verified && !*verified ? kVerify : kOk;
}

int cmd_translate(const std::string& form_path, const std::string& model_path, const std::string& out_path) {
  Formula phi = parse_formula(read_file(form_path));
  PLTS model = parse_plts(read_file(model_path));
  for (const Diagnostic& d : check_formula(phi, &model))
    if (d.severity == Diagnostic::Severity::Warning) std::cerr << "warning: " << d.message << "\n";
  std::string text = print_res(translate(phi, model));
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + out_path);
    out << text;
  }
  return kOk;
}

int cmd_normalize(const std::string& path, const std::string& form, std::size_t cap) {
  Options opts(cap);
  Polarity p = form == "dnf" ? Polarity::DNF : Polarity::CNF;
  RES e = parse_res(read_file(path));
  std::vector<Equation> out;
  for (const Equation& eq : e.equations()) out.push_back(Equation{eq.op, eq.lhs, to_nf(eq.rhs, p, opts).to_expr()});
  std::cout << print_res(RES(std::move(out)));
  return kOk;
}

int cmd_bes(const std::string& path, const std::string& encoding) {
  BES b = parse_bes(read_file(path));
  RES embedded;
  ExtReal t = ExtReal::pos_inf(), fl = ExtReal::neg_inf();
  if (encoding == "literal") {
    embedded = embed_literal(b);
  } else if (encoding.rfind("const:", 0) == 0) {
    std::string spec = encoding.substr(6);
    auto comma = spec.find(',');
    if (comma == std::string::npos) throw InvalidArgument("expected --encoding const:ct,cf");
    try {
      t = ExtReal::parse(spec.substr(0, comma));
      fl = ExtReal::parse(spec.substr(comma + 1));
    } catch (const InvalidArgument&) {
      throw InvalidArgument("malformed constants in '" + encoding + "'");
    }
    embedded = embed_const(b, t, fl);
  } else {
    throw InvalidArgument("unknown encoding '" + encoding + "'");
  }
  std::map<std::string, bool> direct = solve_bes_direct(b);
  SolvedRES real = gauss_solve(embedded);
  bool agree = true;
  for (const BoolEquation& eq : b.equations()) {
    bool d = direct.at(eq.lhs);
    const ExtReal& v = real.at(eq.lhs);
    bool same = v == (d ? t : fl);
    agree = agree && same;
    std::cout << eq.lhs << " = " << (d ? "true" : "false") << " / " << v << (same ? "" : "  MISMATCH") << "\n";
  }
  std::cout << (agree ? "agree" : "disagree") << "\n";
  return agree ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver for real equation systems"};
  app.require_subcommand(1);

  SolveFlags solve;
  auto* s = app.add_subcommand("solve", "Solve a RES file");
  s->add_option("file", solve.path, "RES file")->required();
  s->add_flag("--verify", solve.verify, "Check residuals and compare each equation with the oracle");
  s->add_flag("--json", solve.json, "Machine-readable output");
  s->add_flag("--trace", solve.trace, "Print the elimination steps");
  s->add_option("--cap", solve.cap, "Term-size cap in nodes")->check(CLI::Range(std::size_t{1000}, SIZE_MAX));
  s->add_option("--jobs", solve.jobs, "Worker threads for verification")->check(CLI::PositiveNumber);

  std::string form_path, model_path, out_path;
  auto* t = app.add_subcommand("translate", "Translate a formula and a pLTS to a RES");
  t->add_option("formula", form_path, "Formula file")->required();
  t->add_option("model", model_path, "pLTS file")->required();
  t->add_option("-o,--output", out_path, "Output file (default: standard output)");

  std::string norm_path, form = "cnf";
  std::size_t norm_cap = 1'000'000;
  auto* n = app.add_subcommand("normalize", "Print each right-hand side in normal form");
  n->add_option("file", norm_path, "RES file")->required();
  n->add_option("--form", form, "cnf or dnf")->check(CLI::IsMember({"cnf", "dnf"}));
  n->add_option("--cap", norm_cap, "Term-size cap in nodes")->check(CLI::Range(std::size_t{1000}, SIZE_MAX));

  std::string bes_path, encoding = "literal";
  auto* b = app.add_subcommand("bes", "Solve a BES directly and through an embedding");
  b->add_option("file", bes_path, "BES file")->required();
  b->add_option("--encoding", encoding, "literal or const:ct,cf");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*t) return cmd_translate(form_path, model_path, out_path);
    if (*n) return cmd_normalize(norm_path, form, norm_cap);
    if (*b) return cmd_bes(bes_path, encoding);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const NotClosed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotClosed;
  } catch (const TermBlowup& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBlowup;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemantic;
  }
  return kOk;
}
