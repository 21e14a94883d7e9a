#pragma once

// Boolean equation systems: a direct solver and two embeddings into RESs.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "realeq/expr.hpp"
#include "realeq/res.hpp"

namespace realeq {

class BoolExpr {
 public:
  enum class Kind { Var, True, False, Or, And };

  static BoolExpr variable(std::string name) { return make(Kind::Var, std::move(name), {}); }
  static BoolExpr literal(bool b) { return make(b ? Kind::True : Kind::False, {}, {}); }
  static BoolExpr disj(BoolExpr a, BoolExpr b) { return make(Kind::Or, {}, {std::move(a), std::move(b)}); }
  static BoolExpr conj(BoolExpr a, BoolExpr b) { return make(Kind::And, {}, {std::move(a), std::move(b)}); }

  Kind kind() const { return n_->kind; }
  const std::string& name() const { return n_->name; }
  const BoolExpr& lhs() const { return n_->args[0]; }
  const BoolExpr& rhs() const { return n_->args[1]; }
  bool is_literal() const { return kind() == Kind::True || kind() == Kind::False; }

  friend bool operator==(const BoolExpr& a, const BoolExpr& b) {
    return a.n_ == b.n_ || (a.kind() == b.kind() && a.name() == b.name() && a.n_->args == b.n_->args);
  }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<BoolExpr> args;
  };
  static BoolExpr make(Kind k, std::string name, std::vector<BoolExpr> args) {
    BoolExpr e;
    e.n_ = std::make_shared<Node>(Node{k, std::move(name), std::move(args)});
    return e;
  }
  BoolExpr() = default;

  std::shared_ptr<const Node> n_;
};

inline std::string to_string(const BoolExpr& e, int level = 0) {
  switch (e.kind()) {
    case BoolExpr::Kind::Var: return e.name();
    case BoolExpr::Kind::True: return "true";
    case BoolExpr::Kind::False: return "false";
    case BoolExpr::Kind::Or: {
      std::string s = to_string(e.lhs(), 1) + " || " + to_string(e.rhs(), 0);
      return level > 0 ? "(" + s + ")" : s;
    }
    case BoolExpr::Kind::And: {
      std::string s = to_string(e.lhs(), 2) + " && " + to_string(e.rhs(), 1);
      return level > 1 ? "(" + s + ")" : s;
    }
  }
  return {};
}

inline void collect_variables(const BoolExpr& e, std::set<std::string>& out) {
  if (e.kind() == BoolExpr::Kind::Var) out.insert(e.name());
  if (e.kind() == BoolExpr::Kind::Or || e.kind() == BoolExpr::Kind::And) {
    collect_variables(e.lhs(), out);
    collect_variables(e.rhs(), out);
  }
}

struct BoolEquation {
  FixOp op = FixOp::Mu;
  std::string lhs;
  BoolExpr rhs = BoolExpr::literal(false);

  friend bool operator==(const BoolEquation&, const BoolEquation&) = default;
};

class BES {
 public:
  BES() = default;
  explicit BES(std::vector<BoolEquation> eqs) : eqs_(std::move(eqs)) {
    std::set<std::string> seen;
    for (const BoolEquation& eq : eqs_)
      if (!seen.insert(eq.lhs).second) throw InvalidArgument("variable " + eq.lhs + " is bound twice");
  }

  const std::vector<BoolEquation>& equations() const { return eqs_; }
  std::size_t size() const { return eqs_.size(); }
  const BoolEquation& operator[](std::size_t i) const { return eqs_[i]; }

  std::set<std::string> free_variables() const {
    std::set<std::string> used;
    for (const BoolEquation& eq : eqs_) collect_variables(eq.rhs, used);
    for (const BoolEquation& eq : eqs_) used.erase(eq.lhs);
    return used;
  }

  friend bool operator==(const BES&, const BES&) = default;

 private:
  std::vector<BoolEquation> eqs_;
};

inline std::string to_string(const BES& b) {
  std::string out = "bes\n";
  for (const BoolEquation& eq : b.equations())
    out += std::string(to_string(eq.op)) + " " + eq.lhs + " = " + to_string(eq.rhs) + ";\n";
  return out;
}

namespace detail {

inline Expr embed_bool(const BoolExpr& e) {
  switch (e.kind()) {
    case BoolExpr::Kind::Var: return var(e.name());
    case BoolExpr::Kind::True: return pos_inf_expr();
    case BoolExpr::Kind::False: return neg_inf_expr();
    case BoolExpr::Kind::Or: return max(embed_bool(e.lhs()), embed_bool(e.rhs()));
    case BoolExpr::Kind::And: return min(embed_bool(e.lhs()), embed_bool(e.rhs()));
  }
  return neg_inf_expr();
}

}  // namespace detail

/// true as inf, false as -inf, disjunction as max, conjunction as min.
inline RES embed_literal(const BES& b) {
  std::vector<Equation> eqs;
  for (const BoolEquation& eq : b.equations()) eqs.push_back(Equation{eq.op, eq.lhs, detail::embed_bool(eq.rhs)});
  return RES(std::move(eqs));
}

/// Every right-hand side e becomes  cf \/ (ct /\ e).
inline RES embed_const(const BES& b, const ExtReal& ct, const ExtReal& cf) {
  if (!(ct > cf)) throw BadConstants("need ct > cf, got ct = " + ct.str() + ", cf = " + cf.str());
  std::vector<Equation> eqs;
  for (const BoolEquation& eq : b.equations())
    eqs.push_back(Equation{eq.op, eq.lhs, max(constant(cf), min(constant(ct), detail::embed_bool(eq.rhs)))});
  return RES(std::move(eqs));
}

namespace detail {

inline BoolExpr bool_or(const BoolExpr& a, const BoolExpr& b) {
  if (a.kind() == BoolExpr::Kind::True || b.kind() == BoolExpr::Kind::False) return a;
  if (b.kind() == BoolExpr::Kind::True || a.kind() == BoolExpr::Kind::False) return b;
  if (a == b) return a;
  // absorption: a || (a && c) = a
  if (b.kind() == BoolExpr::Kind::And && (b.lhs() == a || b.rhs() == a)) return a;
  if (a.kind() == BoolExpr::Kind::And && (a.lhs() == b || a.rhs() == b)) return b;
  return BoolExpr::disj(a, b);
}

inline BoolExpr bool_and(const BoolExpr& a, const BoolExpr& b) {
  if (a.kind() == BoolExpr::Kind::False || b.kind() == BoolExpr::Kind::True) return a;
  if (b.kind() == BoolExpr::Kind::False || a.kind() == BoolExpr::Kind::True) return b;
  if (a == b) return a;
  if (b.kind() == BoolExpr::Kind::Or && (b.lhs() == a || b.rhs() == a)) return a;
  if (a.kind() == BoolExpr::Kind::Or && (a.lhs() == b || a.rhs() == b)) return b;
  return BoolExpr::conj(a, b);
}

inline BoolExpr bool_substitute(const BoolExpr& e, const std::string& x, const BoolExpr& r) {
  switch (e.kind()) {
    case BoolExpr::Kind::Var: return e.name() == x ? r : e;
    case BoolExpr::Kind::Or: return bool_or(bool_substitute(e.lhs(), x, r), bool_substitute(e.rhs(), x, r));
    case BoolExpr::Kind::And: return bool_and(bool_substitute(e.lhs(), x, r), bool_substitute(e.rhs(), x, r));
    default: return e;
  }
}

}  // namespace detail

/// Gauss elimination over the booleans: in  mu X = e  occurrences of X become
/// false, in  nu X = e  they become true.
inline std::map<std::string, bool> solve_bes_direct(const BES& b) {
  if (auto free = b.free_variables(); !free.empty())
    throw NotClosed("system is not closed; unbound variable " + *free.begin());
  std::vector<BoolExpr> rhs;
  for (const BoolEquation& eq : b.equations()) rhs.push_back(eq.rhs);
  for (std::size_t k = rhs.size(); k-- > 0;) {
    const std::string& x = b[k].lhs;
    rhs[k] = detail::bool_substitute(rhs[k], x, BoolExpr::literal(b[k].op == FixOp::Nu));
    for (std::size_t i = 0; i < k; ++i) rhs[i] = detail::bool_substitute(rhs[i], x, rhs[k]);
  }
  std::map<std::string, bool> out;
  for (std::size_t t = 0; t < rhs.size(); ++t) {
    BoolExpr value = rhs[t];
    for (const auto& [name, v] : out) value = detail::bool_substitute(value, name, BoolExpr::literal(v));
    if (!value.is_literal()) throw std::logic_error("boolean elimination left " + to_string(value));
    out[b[t].lhs] = value.kind() == BoolExpr::Kind::True;
  }
  return out;
}

}  // namespace realeq
