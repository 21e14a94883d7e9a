#pragma once

// Closed-form solution of a single fixed-point equation  sigma X = e.

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "realeq/expr.hpp"
#include "realeq/normal_form.hpp"
#include "realeq/simplify.hpp"

namespace realeq {

enum class FixOp { Mu, Nu };

inline const char* to_string(FixOp op) { return op == FixOp::Mu ? "mu" : "nu"; }

/// One atom  c*X + c'*eqninf(X) + f  with f free of X.
struct ExposedAtom {
  Rational c;  // 0 when X does not occur linearly
  bool cprime = false;
  Expr f = constant(ExtReal(0));
};

struct ExposedClause {
  std::vector<ExposedAtom> atoms;
  Expr m = constant(ExtReal(0));  // join (CNF) or meet (DNF) of the X-free atoms
};

/// A simple normal form with the occurrences of one variable made explicit.
struct ClauseDecomposition {
  Polarity polarity = Polarity::CNF;
  std::string var;
  std::vector<ExposedClause> clauses;

  /// The decomposed form as an expression again.
  Expr to_expr() const {
    const bool cnf = polarity == Polarity::CNF;
    std::vector<Expr> outer;
    for (const ExposedClause& cl : clauses) {
      std::vector<Expr> inner;
      for (const ExposedAtom& a : cl.atoms) {
        std::vector<Expr> terms;
        if (a.c != 0) terms.push_back(scale(PosRational(a.c), var_expr()));
        if (a.cprime) terms.push_back(eq_neg_inf(var_expr()));
        terms.push_back(a.f);
        Expr sum = terms.back();
        for (std::size_t i = terms.size() - 1; i-- > 0;) sum = add(terms[i], sum);
        inner.push_back(sum);
      }
      inner.push_back(cl.m);
      outer.push_back(cnf ? join_all(inner) : meet_all(inner));
    }
    return cnf ? meet_all(outer) : join_all(outer);
  }

  Expr var_expr() const { return realeq::var(var); }
};

inline ClauseDecomposition expose(const std::string& x, const SimpleNF& nf) {
  const bool cnf = nf.polarity == Polarity::CNF;
  ClauseDecomposition dec;
  dec.polarity = nf.polarity;
  dec.var = x;
  for (const Clause& clause : nf.clauses) {
    ExposedClause out;
    std::vector<Expr> rest;
    for (const LinearAtom& atom : clause) {
      auto coeff = atom.coeffs.find(x);
      bool has_c = coeff != atom.coeffs.end();
      bool has_t = atom.tests.count(x) != 0;
      if (!has_c && !has_t) {
        rest.push_back(atom.to_expr());
        continue;
      }
      ExposedAtom e;
      e.c = has_c ? coeff->second.value() : Rational(0);
      e.cprime = has_t;
      LinearAtom remainder = atom;
      remainder.coeffs.erase(x);
      remainder.tests.erase(x);
      e.f = remainder.to_expr();
      out.atoms.push_back(std::move(e));
    }
    out.m = simplify(cnf ? join_all(rest) : meet_all(rest));
    dec.clauses.push_back(std::move(out));
  }
  return dec;
}

namespace detail {

// (c - 1) * u, with the convention that it is 0 when c = 1.
inline Expr steep_offset(const Rational& c, const Expr& u) {
  if (c == 1) return constant(ExtReal(0));
  return smart::scale(PosRational(Rational(c - 1)), u);
}

inline Expr flat_bound(const Rational& c, const Expr& f) {
  return smart::scale(PosRational(Rational(Rational(1) / (Rational(1) - c))), f);
}

}  // namespace detail

/// Least solution of  mu X = dec  for a CNF decomposition.
inline Expr sol_mu_simple(const ClauseDecomposition& dec) {
  const Expr inf = pos_inf_expr();
  const Expr ninf = neg_inf_expr();
  Expr result = inf;
  for (const ExposedClause& cl : dec.clauses) {
    Expr any_f = ninf;
    Expr u = cl.m;
    bool any_test = false;
    for (const ExposedAtom& a : cl.atoms) {
      any_f = smart::max(any_f, a.f);
      if (a.c < 1) u = smart::max(u, detail::flat_bound(a.c, a.f));
      any_test = any_test || a.cprime;
    }
    Expr steep = any_test ? inf : ninf;
    for (const ExposedAtom& a : cl.atoms)
      if (a.c >= 1) steep = smart::max(steep, smart::add(a.f, detail::steep_offset(a.c, u)));
    Expr sol = smart::cond(smart::eq_inf(any_f),
                           smart::cond(smart::eq_neg_inf(cl.m), ninf, smart::cond(steep, u, inf)), inf);
    result = smart::min(result, sol);
  }
  return result;
}

/// Greatest solution of  nu X = dec  for a DNF decomposition.
inline Expr sol_nu_simple(const ClauseDecomposition& dec) {
  const Expr inf = pos_inf_expr();
  const Expr ninf = neg_inf_expr();
  Expr result = ninf;
  for (const ExposedClause& cl : dec.clauses) {
    Expr u = cl.m;
    for (const ExposedAtom& a : cl.atoms)
      if (a.c < 1 && !a.cprime) u = smart::min(u, detail::flat_bound(a.c, a.f));
    Expr steep = inf;
    for (const ExposedAtom& a : cl.atoms)
      if (a.c >= 1 && !a.cprime) steep = smart::min(steep, smart::add(a.f, detail::steep_offset(a.c, u)));
    Expr sol = smart::cond(smart::eq_inf(cl.m), smart::conda(steep, ninf, u), inf);
    result = smart::max(result, sol);
  }
  return result;
}

namespace detail {

class NFSolver {
 public:
  NFSolver(FixOp op, std::string x, const Options& opts) : op_(op), x_(std::move(x)), opts_(opts) {}

  Expr solve(const NF& n) {
    if (auto it = memo_.find(n.id()); it != memo_.end()) return it->second.second;
    Expr out = n.is_leaf() ? solve_leaf(n.simple()) : solve_cond(n);
    opts_.check(out.size() > opts_.max_term_size ? dag_size(out) : out.size(), "solution");
    memo_.emplace(n.id(), std::make_pair(n, out));
    return out;
  }

  Expr solve_leaf(const SimpleNF& s) {
    ClauseDecomposition dec = expose(x_, s);
    return op_ == FixOp::Mu ? sol_mu_simple(dec) : sol_nu_simple(dec);
  }

  Expr solve_cond(const NF& n) {
    Expr guard = n.guard().to_expr();
    auto at = [&](const Expr& value) { return substitute_simplify(guard, x_, value); };
    if (n.kind() == NF::Kind::Cond) {
      if (op_ == FixOp::Mu) {
        Expr a = solve(n.then_branch());
        Expr b = solve(n.else_branch());
        return smart::cond(at(smart::min(a, b)), a, b);
      }
      Expr b = solve(n.else_branch());
      Expr ab = solve(prune(nf_min(n.then_branch(), n.else_branch(), opts_), opts_));
      return smart::cond(at(b), ab, b);
    }
    if (op_ == FixOp::Mu) {
      Expr a = solve(n.then_branch());
      Expr ab = solve(prune(nf_max(n.then_branch(), n.else_branch(), opts_), opts_));
      return smart::conda(at(a), a, ab);
    }
    Expr a = solve(n.then_branch());
    Expr b = solve(n.else_branch());
    return smart::conda(at(smart::max(a, b)), a, b);
  }

 private:
  FixOp op_;
  std::string x_;
  const Options& opts_;
  // Keeps the keyed node alive so its address is not reused.
  std::unordered_map<const void*, std::pair<NF, Expr>> memo_;
};

}  // namespace detail

namespace detail {

// Replaces every maximal compound subterm free of x by a fresh variable
// "#k"; `back` maps the fresh names to the replaced subterms.
class FreeAbstraction {
 public:
  explicit FreeAbstraction(std::string x) : x_(std::move(x)) {}

  Expr run(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second.second;
    Expr out = e;
    if (e.is_var() || e.is_const()) {
      out = e;
    } else if (!mentions(e)) {
      auto [it, fresh] = names_.try_emplace(e, "#" + std::to_string(names_.size()));
      if (fresh) back_.emplace(it->second, e);
      out = var(it->second);
    } else {
      std::vector<Expr> args;
      for (int i = 0; i < e.num_args(); ++i) args.push_back(run(e.arg(i)));
      out = with_args(e, std::move(args));
    }
    memo_.emplace(e.id(), std::make_pair(e, out));
    return out;
  }

  const std::map<std::string, Expr>& back() const { return back_; }

 private:
  bool mentions(const Expr& e) {
    if (auto it = mentions_.find(e.id()); it != mentions_.end()) return it->second;
    bool m = e.is_var() ? e.name() == x_ : false;
    for (int i = 0; i < e.num_args() && !m; ++i) m = mentions(e.arg(i));
    mentions_.emplace(e.id(), m);
    return m;
  }

  std::string x_;
  std::unordered_map<const void*, std::pair<Expr, Expr>> memo_;
  std::unordered_map<const void*, bool> mentions_;
  std::unordered_map<Expr, std::string, ExprHash> names_;
  std::map<std::string, Expr> back_;
};

}  // namespace detail

/// Solution for an equation whose right-hand side is a conditional node.
inline Expr sol_conditional(FixOp op, const std::string& x, const NF& node, const Options& opts = {}) {
  if (node.is_leaf()) throw NotConditional("sol_conditional expects a conditional node");
  detail::NFSolver solver(op, x, opts);
  return solver.solve(node);
}

struct Solution {
  Expr rhs;
};

/// sigma X = e  is equivalent to  sigma X = solve_single(sigma, X, e).rhs,
/// and X does not occur in the result.
inline Solution solve_single(FixOp op, const std::string& x, const Expr& e, const Options& opts = {}) {
  if (contains_op(e, Op::Neg)) throw NegationPresent("cannot solve an equation containing negation");
  if (!occurs(x, e)) return Solution{simplify(e)};
  detail::FreeAbstraction abstraction(x);
  Expr abstracted = abstraction.run(simplify(e));
  NF nf = to_nf(abstracted, op == FixOp::Mu ? Polarity::CNF : Polarity::DNF, opts);
  detail::NFSolver solver(op, x, opts);
  Expr rhs = solver.solve(nf);
  rhs = abstraction.back().empty() ? simplify(rhs) : substitute_simplify(rhs, abstraction.back());
  if (occurs(x, rhs)) throw std::logic_error("solution still mentions " + x);
  return Solution{rhs};
}

}  // namespace realeq
