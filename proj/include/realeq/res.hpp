#pragma once

// Real equation systems and their solution by Gauss elimination.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "realeq/expr.hpp"
#include "realeq/simplify.hpp"
#include "realeq/solver.hpp"

namespace realeq {

struct Equation {
  FixOp op = FixOp::Mu;
  std::string lhs;
  Expr rhs = constant(ExtReal(0));

  friend bool operator==(const Equation&, const Equation&) = default;
};

/// Ordered sequence of fixed-point equations with distinct left-hand sides.
class RES {
 public:
  RES() = default;
  explicit RES(std::vector<Equation> equations) : equations_(std::move(equations)) {
    std::set<std::string> seen;
    for (const Equation& eq : equations_)
      if (!seen.insert(eq.lhs).second) throw InvalidArgument("variable " + eq.lhs + " is bound twice");
  }

  const std::vector<Equation>& equations() const { return equations_; }
  std::size_t size() const { return equations_.size(); }
  bool empty() const { return equations_.empty(); }
  const Equation& operator[](std::size_t i) const { return equations_[i]; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < equations_.size(); ++i)
      if (equations_[i].lhs == name) return i;
    return std::nullopt;
  }

  void set_rhs(std::size_t i, Expr rhs) { equations_.at(i).rhs = std::move(rhs); }

  friend bool operator==(const RES&, const RES&) = default;

 private:
  std::vector<Equation> equations_;
};

using SolvedRES = std::map<std::string, ExtReal>;

inline std::set<std::string> bnd(const RES& e) {
  std::set<std::string> vars;
  for (const Equation& eq : e.equations()) vars.insert(eq.lhs);
  return vars;
}

/// Variables used on right-hand sides but not bound by the system.
inline std::set<std::string> free_variables(const RES& e) {
  std::set<std::string> bound = bnd(e);
  std::set<std::string> free;
  for (const Equation& eq : e.equations())
    for (const std::string& v : occ(eq.rhs))
      if (!bound.count(v)) free.insert(v);
  return free;
}

inline bool is_closed(const RES& e) { return free_variables(e).empty(); }

/// Text form accepted by the RES parser.
inline std::string to_string(const RES& e) {
  std::string out = "res\n";
  for (const Equation& eq : e.equations()) {
    out += to_string(eq.op);
    out += ' ';
    out += eq.lhs;
    out += " = ";
    out += to_string(eq.rhs);
    out += ";\n";
  }
  return out;
}

/// Replaces the lhs variable of equation j by its rhs inside equation i (i < j).
inline RES substitute_later_into_earlier(const RES& e, std::size_t i, std::size_t j) {
  if (!(i < j)) throw IndexOrder("substitution needs an earlier target, got " + std::to_string(i) + " >= " +
                                 std::to_string(j));
  if (j >= e.size()) throw IndexOrder("equation index " + std::to_string(j) + " out of range");
  RES out = e;
  out.set_rhs(i, substitute(e[i].rhs, e[j].lhs, e[j].rhs));
  return out;
}

struct TraceStep {
  std::string rule;  // "solve", "E3" or "E4"
  std::string note;
  RES before;
  RES after;
};

namespace detail {

class Gauss {
 public:
  Gauss(const RES& e, const Options& opts, std::vector<TraceStep>* trace) : work_(e), opts_(opts), trace_(trace) {
    for (std::size_t i = 0; i < e.size(); ++i) order_.push_back(i);
  }

  // For k = n..1: solve equation k, then substitute its solution upwards.
  void backward() {
    for (std::size_t k = work_.size(); k-- > 0;) {
      const Equation& eq = work_[k];
      RES before = shown();
      Expr solved = solve_single(eq.op, eq.lhs, eq.rhs, opts_).rhs;
      work_.set_rhs(k, solved);
      record("solve", "solve " + eq.lhs, std::move(before));

      before = shown();
      bool changed = false;
      for (std::size_t i = 0; i < k; ++i) {
        if (!occurs(work_[k].lhs, work_[i].rhs)) continue;
        Expr next = substitute_simplify(work_[i].rhs, work_[k].lhs, work_[k].rhs);
        check(next);
        work_.set_rhs(i, next);
        changed = true;
      }
      if (changed) record("E3", "substitute " + work_[k].lhs, std::move(before));
    }
  }

  // Equation 1 is constant; move it to the end and substitute its value, repeatedly.
  SolvedRES forward() {
    SolvedRES values;
    Valuation eta;
    for (std::size_t t = 0; t < work_.size(); ++t) {
      const std::string& name = work_[t].lhs;
      ExtReal value = evaluate(work_[t].rhs, eta);
      values[name] = value;
      eta.set(name, value);
      work_.set_rhs(t, constant(value));
      if (t + 1 == work_.size()) break;

      RES before = shown();
      order_.erase(std::find(order_.begin(), order_.end(), t));
      order_.push_back(t);
      record("E4", "move " + name + " to the end", std::move(before));

      before = shown();
      bool changed = false;
      for (std::size_t i = t + 1; i < work_.size(); ++i) {
        if (!occurs(name, work_[i].rhs)) continue;
        work_.set_rhs(i, substitute_simplify(work_[i].rhs, name, constant(value)));
        changed = true;
      }
      if (changed) record("E3", "substitute " + name, std::move(before));
    }
    return values;
  }

  const RES& system() const { return work_; }

 private:
  RES shown() const {
    if (!trace_) return RES();
    std::vector<Equation> eqs;
    for (std::size_t i : order_) eqs.push_back(work_[i]);
    return RES(std::move(eqs));
  }

  void record(const char* rule, std::string note, RES before) {
    if (trace_) trace_->push_back(TraceStep{rule, std::move(note), std::move(before), shown()});
  }

  void check(const Expr& e) const {
    if (e.size() > opts_.max_term_size) opts_.check(dag_size(e), "right-hand side");
  }

  RES work_;
  const Options& opts_;
  std::vector<TraceStep>* trace_;
  std::vector<std::size_t> order_;
};

}  // namespace detail

/// Backward elimination only: afterwards equation k mentions no variable
/// bound at positions k..n. Works on open systems.
inline RES backward_eliminate(const RES& e, const Options& opts = {}) {
  detail::Gauss g(e, opts, nullptr);
  g.backward();
  return g.system();
}

/// Exact solution of a closed system.
inline SolvedRES gauss_solve(const RES& e, const Options& opts = {}, std::vector<TraceStep>* steps = nullptr) {
  if (auto free = free_variables(e); !free.empty())
    throw NotClosed("system is not closed; unbound variable " + *free.begin());
  detail::Gauss g(e, opts, steps);
  g.backward();
  return g.forward();
}

/// Derivation log of gauss_solve.
inline std::vector<TraceStep> trace(const RES& e, const Options& opts = {}) {
  std::vector<TraceStep> steps;
  gauss_solve(e, opts, &steps);
  return steps;
}

}  // namespace realeq
