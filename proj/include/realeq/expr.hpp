#pragma once

// Expression trees over the extended reals: variables, constants, positive
// scaling, addition, min/max, the two conditionals and the infinity tests.
// Negation is accepted from input and removed by eliminate_negation().

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "realeq/errors.hpp"
#include "realeq/extreal.hpp"

namespace realeq {

enum class Op : std::uint8_t { Var, Const, Scale, Add, Min, Max, Cond, CondA, EqInf, EqNegInf, Neg };

inline int arity(Op op) {
  switch (op) {
    case Op::Var:
    case Op::Const: return 0;
    case Op::Scale:
    case Op::EqInf:
    case Op::EqNegInf:
    case Op::Neg: return 1;
    case Op::Add:
    case Op::Min:
    case Op::Max: return 2;
    case Op::Cond:
    case Op::CondA: return 3;
  }
  return 0;
}

/// Immutable, structurally shared expression handle.
class Expr {
 public:
  struct Node;

  Op op() const;
  const std::string& name() const;      // Var
  const ExtReal& value() const;          // Const
  const PosRational& coeff() const;      // Scale
  const Expr& arg(std::size_t i) const;  // children, in syntactic order
  int num_args() const { return arity(op()); }

  /// Tree size (shared subtrees counted each time they occur), saturating.
  std::size_t size() const;
  std::size_t hash() const;

  bool is_const() const { return op() == Op::Const; }
  bool is_var() const { return op() == Op::Var; }
  const Node* id() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);

  static Expr make(Op op, std::string name, ExtReal value, PosRational coeff, std::vector<Expr> args);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Op op;
  std::string name;
  ExtReal value;
  PosRational coeff{1};
  std::vector<Expr> args;
  std::size_t size = 1;
  std::size_t hash = 0;
};

inline Op Expr::op() const { return node_->op; }
inline const std::string& Expr::name() const { return node_->name; }
inline const ExtReal& Expr::value() const { return node_->value; }
inline const PosRational& Expr::coeff() const { return node_->coeff; }
inline const Expr& Expr::arg(std::size_t i) const { return node_->args[i]; }
inline std::size_t Expr::size() const { return node_->size; }
inline std::size_t Expr::hash() const { return node_->hash; }

inline Expr Expr::make(Op op, std::string name, ExtReal value, PosRational coeff, std::vector<Expr> args) {
  auto node = std::make_shared<Node>();
  node->op = op;
  std::size_t h = std::hash<int>{}(static_cast<int>(op)) * 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  switch (op) {
    case Op::Var: mix(std::hash<std::string>{}(name)); break;
    case Op::Const: mix(std::hash<ExtReal>{}(value)); break;
    case Op::Scale: mix(std::hash<std::string>{}(coeff.str())); break;
    default: break;
  }
  std::size_t size = 1;
  for (const Expr& a : args) {
    mix(a.hash());
    size = a.size() > SIZE_MAX - size ? SIZE_MAX : size + a.size();
  }
  node->name = std::move(name);
  node->value = std::move(value);
  node->coeff = std::move(coeff);
  node->args = std::move(args);
  node->size = size;
  node->hash = h;
  return Expr(std::move(node));
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.op() != b.op() || a.size() != b.size()) return false;
  switch (a.op()) {
    case Op::Var: return a.name() == b.name();
    case Op::Const: return a.value() == b.value();
    case Op::Scale:
      if (!(a.coeff() == b.coeff())) return false;
      break;
    default: break;
  }
  for (int i = 0; i < a.num_args(); ++i)
    if (!(a.arg(i) == b.arg(i))) return false;
  return true;
}

struct ExprHash {
  std::size_t operator()(const Expr& e) const noexcept { return e.hash(); }
};

// Raw constructors. No simplification happens here; see simplify().

inline Expr var(std::string name) {
  if (name.empty()) throw InvalidArgument("variable name must be non-empty");
  return Expr::make(Op::Var, std::move(name), {}, PosRational(1), {});
}
inline Expr constant(ExtReal value) { return Expr::make(Op::Const, {}, std::move(value), PosRational(1), {}); }
inline Expr scale(PosRational c, Expr e) { return Expr::make(Op::Scale, {}, {}, std::move(c), {std::move(e)}); }
inline Expr add(Expr a, Expr b) { return Expr::make(Op::Add, {}, {}, PosRational(1), {std::move(a), std::move(b)}); }
inline Expr min(Expr a, Expr b) { return Expr::make(Op::Min, {}, {}, PosRational(1), {std::move(a), std::move(b)}); }
inline Expr max(Expr a, Expr b) { return Expr::make(Op::Max, {}, {}, PosRational(1), {std::move(a), std::move(b)}); }
inline Expr cond(Expr g, Expr a, Expr b) {
  return Expr::make(Op::Cond, {}, {}, PosRational(1), {std::move(g), std::move(a), std::move(b)});
}
inline Expr conda(Expr g, Expr a, Expr b) {
  return Expr::make(Op::CondA, {}, {}, PosRational(1), {std::move(g), std::move(a), std::move(b)});
}
inline Expr eq_inf(Expr e) { return Expr::make(Op::EqInf, {}, {}, PosRational(1), {std::move(e)}); }
inline Expr eq_neg_inf(Expr e) { return Expr::make(Op::EqNegInf, {}, {}, PosRational(1), {std::move(e)}); }
inline Expr neg(Expr e) { return Expr::make(Op::Neg, {}, {}, PosRational(1), {std::move(e)}); }

inline Expr pos_inf_expr() { return constant(ExtReal::pos_inf()); }
inline Expr neg_inf_expr() { return constant(ExtReal::neg_inf()); }

/// Right-nested join of `items`; -inf when empty.
inline Expr join_all(const std::vector<Expr>& items) {
  if (items.empty()) return neg_inf_expr();
  Expr acc = items.back();
  for (std::size_t i = items.size() - 1; i-- > 0;) acc = max(items[i], acc);
  return acc;
}

/// Right-nested meet of `items`; inf when empty.
inline Expr meet_all(const std::vector<Expr>& items) {
  if (items.empty()) return pos_inf_expr();
  Expr acc = items.back();
  for (std::size_t i = items.size() - 1; i-- > 0;) acc = min(items[i], acc);
  return acc;
}

/// Rebuilds `e` with new children, reusing `e` when nothing changed.
inline Expr with_args(const Expr& e, std::vector<Expr> args) {
  bool same = true;
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i].id() != e.arg(i).id()) same = false;
  if (same) return e;
  return Expr::make(e.op(), e.name(), e.value(), e.coeff(), std::move(args));
}

/// Total map from variable names to values, with a configurable default.
class Valuation {
 public:
  explicit Valuation(ExtReal fallback = ExtReal::neg_inf()) : fallback_(std::move(fallback)) {}
  Valuation(std::initializer_list<std::pair<const std::string, ExtReal>> init,
            ExtReal fallback = ExtReal::neg_inf())
      : values_(init), fallback_(std::move(fallback)) {}

  const ExtReal& operator()(const std::string& name) const {
    auto it = values_.find(name);
    return it == values_.end() ? fallback_ : it->second;
  }
  bool contains(const std::string& name) const { return values_.count(name) != 0; }

  void set(const std::string& name, ExtReal value) { values_[name] = std::move(value); }
  /// eta[name := value]
  Valuation updated(const std::string& name, ExtReal value) const {
    Valuation copy = *this;
    copy.set(name, std::move(value));
    return copy;
  }

  const std::map<std::string, ExtReal>& bindings() const { return values_; }
  const ExtReal& fallback() const { return fallback_; }

 private:
  std::map<std::string, ExtReal> values_;
  ExtReal fallback_;
};

namespace detail {

inline ExtReal evaluate_node(const Expr& e, const Valuation& eta,
                             std::unordered_map<const Expr::Node*, ExtReal>* memo) {
  if (memo) {
    auto it = memo->find(e.id());
    if (it != memo->end()) return it->second;
  }
  auto sub = [&](int i) { return evaluate_node(e.arg(i), eta, memo); };
  ExtReal result;
  switch (e.op()) {
    case Op::Var: result = eta(e.name()); break;
    case Op::Const: result = e.value(); break;
    case Op::Scale: result = scale(e.coeff(), sub(0)); break;
    case Op::Add: result = add(sub(0), sub(1)); break;
    case Op::Min: result = min(sub(0), sub(1)); break;
    case Op::Max: result = max(sub(0), sub(1)); break;
    case Op::Cond: result = cond(sub(0), sub(1), sub(2)); break;
    case Op::CondA: result = conda(sub(0), sub(1), sub(2)); break;
    case Op::EqInf: result = eq_inf(sub(0)); break;
    case Op::EqNegInf: result = eq_neg_inf(sub(0)); break;
    case Op::Neg: throw NegationPresent("cannot evaluate an expression containing negation");
  }
  if (memo) memo->emplace(e.id(), result);
  return result;
}

}  // namespace detail

/// eta(e). Throws NegationPresent on a Neg node.
inline ExtReal evaluate(const Expr& e, const Valuation& eta) {
  if (e.size() < 64) return detail::evaluate_node(e, eta, nullptr);
  std::unordered_map<const Expr::Node*, ExtReal> memo;
  return detail::evaluate_node(e, eta, &memo);
}

/// Evaluation with the standard meaning of negation, used as a reference for
/// eliminate_negation().
inline ExtReal evaluate_with_negation(const Expr& e, const Valuation& eta) {
  auto sub = [&](int i) { return evaluate_with_negation(e.arg(i), eta); };
  switch (e.op()) {
    case Op::Neg: return negate(sub(0));
    case Op::Var: return eta(e.name());
    case Op::Const: return e.value();
    case Op::Scale: return scale(e.coeff(), sub(0));
    case Op::Add: return add(sub(0), sub(1));
    case Op::Min: return min(sub(0), sub(1));
    case Op::Max: return max(sub(0), sub(1));
    case Op::Cond: return cond(sub(0), sub(1), sub(2));
    case Op::CondA: return conda(sub(0), sub(1), sub(2));
    case Op::EqInf: return eq_inf(sub(0));
    case Op::EqNegInf: return eq_neg_inf(sub(0));
  }
  return {};
}

/// occ(e): the variables occurring in e.
inline std::set<std::string> occ(const Expr& e) {
  std::set<std::string> vars;
  std::unordered_set<const Expr::Node*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur.id()).second) continue;
    if (cur.is_var()) vars.insert(cur.name());
    for (int i = 0; i < cur.num_args(); ++i) stack.push_back(cur.arg(i));
  }
  return vars;
}

/// Number of distinct nodes.
inline std::size_t dag_size(const Expr& e) {
  std::unordered_set<const Expr::Node*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur.id()).second) continue;
    for (int i = 0; i < cur.num_args(); ++i) stack.push_back(cur.arg(i));
  }
  return seen.size();
}

inline bool occurs(const std::string& name, const Expr& e) {
  std::unordered_set<const Expr::Node*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur.id()).second) continue;
    if (cur.is_var() && cur.name() == name) return true;
    for (int i = 0; i < cur.num_args(); ++i) stack.push_back(cur.arg(i));
  }
  return false;
}

inline bool contains_op(const Expr& e, Op op) {
  std::unordered_set<const Expr::Node*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur.id()).second) continue;
    if (cur.op() == op) return true;
    for (int i = 0; i < cur.num_args(); ++i) stack.push_back(cur.arg(i));
  }
  return false;
}

inline bool has_conditional(const Expr& e) { return contains_op(e, Op::Cond) || contains_op(e, Op::CondA); }

/// Simultaneous substitution of expressions for variables. Shared subtrees
/// stay shared in the result.
inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  std::unordered_map<const Expr::Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& cur) -> Expr {
    if (cur.is_var()) {
      auto it = bindings.find(cur.name());
      return it == bindings.end() ? cur : it->second;
    }
    if (cur.num_args() == 0) return cur;
    auto it = memo.find(cur.id());
    if (it != memo.end()) return it->second;
    std::vector<Expr> args;
    args.reserve(cur.num_args());
    for (int i = 0; i < cur.num_args(); ++i) args.push_back(go(cur.arg(i)));
    Expr out = with_args(cur, std::move(args));
    memo.emplace(cur.id(), out);
    return out;
  };
  return go(e);
}

/// e[name := replacement]
inline Expr substitute(const Expr& e, const std::string& name, const Expr& replacement) {
  return substitute(e, std::map<std::string, Expr>{{name, replacement}});
}

/// Pushes negation to the leaves using the negation laws and folds it into
/// constants. A variable below an odd number of negations raises OddNegation.
inline Expr eliminate_negation(const Expr& e) {
  std::map<std::pair<const Expr::Node*, bool>, Expr> memo;
  std::function<Expr(const Expr&, bool)> go = [&](const Expr& cur, bool negated) -> Expr {
    auto key = std::make_pair(cur.id(), negated);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    auto sub = [&](int i, bool n) { return go(cur.arg(i), n); };
    Expr out = cur;
    if (!negated) {
      if (cur.op() == Op::Neg) {
        out = sub(0, true);
      } else if (cur.num_args() > 0) {
        std::vector<Expr> args;
        for (int i = 0; i < cur.num_args(); ++i) args.push_back(sub(i, false));
        out = with_args(cur, std::move(args));
      }
    } else {
      switch (cur.op()) {
        case Op::Var:
          throw OddNegation("variable " + cur.name() + " occurs under an odd number of negations");
        case Op::Const: out = constant(negate(cur.value())); break;
        case Op::Neg: out = sub(0, false); break;
        case Op::Scale: out = scale(cur.coeff(), sub(0, true)); break;
        case Op::Add: {
          // -(a + b) = -a +^ -b, with +^ spelled out through its conditional definition.
          Expr a = sub(0, true);
          Expr b = sub(1, true);
          out = cond(eq_neg_inf(a), neg_inf_expr(), cond(eq_neg_inf(b), neg_inf_expr(), add(a, b)));
          break;
        }
        case Op::Min: out = max(sub(0, true), sub(1, true)); break;
        case Op::Max: out = min(sub(0, true), sub(1, true)); break;
        case Op::Cond: out = conda(sub(0, true), sub(2, true), sub(1, true)); break;
        case Op::CondA: out = cond(sub(0, true), sub(2, true), sub(1, true)); break;
        case Op::EqInf: out = eq_neg_inf(sub(0, true)); break;
        case Op::EqNegInf: out = eq_inf(sub(0, true)); break;
      }
    }
    memo.emplace(key, out);
    return out;
  };
  return go(e, false);
}

// ---------------------------------------------------------------------------
// Printing. The output is accepted by the RES expression parser and parses
// back to the same tree.

namespace detail {

inline int print_level(Op op) {
  switch (op) {
    case Op::Max: return 0;
    case Op::Min: return 1;
    case Op::Add: return 2;
    case Op::Scale: return 3;
    default: return 4;
  }
}

inline void print_expr(std::string& out, const Expr& e, int required) {
  int level = print_level(e.op());
  bool parens = level < required;
  if (parens) out += '(';
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    for (int i = 0; i < e.num_args(); ++i) {
      if (i) out += ", ";
      print_expr(out, e.arg(i), 0);
    }
    out += ')';
  };
  switch (e.op()) {
    case Op::Var: out += e.name(); break;
    case Op::Const: out += e.value().str(); break;
    case Op::Scale:
      out += e.coeff().str();
      out += " * ";
      print_expr(out, e.arg(0), 3);
      break;
    case Op::Add:
      print_expr(out, e.arg(0), 3);
      out += " + ";
      print_expr(out, e.arg(1), 2);
      break;
    case Op::Min:
      print_expr(out, e.arg(0), 2);
      out += " /\\ ";
      print_expr(out, e.arg(1), 1);
      break;
    case Op::Max:
      print_expr(out, e.arg(0), 1);
      out += " \\/ ";
      print_expr(out, e.arg(1), 0);
      break;
    case Op::Cond: call("cond"); break;
    case Op::CondA: call("conda"); break;
    case Op::EqInf: call("eqinf"); break;
    case Op::EqNegInf: call("eqninf"); break;
    case Op::Neg:
      out += "-(";
      print_expr(out, e.arg(0), 0);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_expr(out, e, 0);
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace realeq
