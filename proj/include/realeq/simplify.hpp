#pragma once

// Semantics-preserving local simplification of expressions. The functions in
// `smart` assume their arguments are already simplified and return a
// simplified node; simplify() applies them bottom-up.

#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "realeq/expr.hpp"

namespace realeq {

/// Resource limits shared by the rewriting modules.
struct Options {
  static constexpr std::size_t kMinTermSize = 1000;

  std::size_t max_term_size = 1'000'000;

  Options() = default;
  explicit Options(std::size_t cap) : max_term_size(cap) {
    if (cap < kMinTermSize) throw InvalidArgument("term-size cap must be at least 1000");
  }

  void check(std::size_t size, const char* what) const {
    if (size > max_term_size)
      throw TermBlowup(std::string(what) + " exceeds the term-size cap of " + std::to_string(max_term_size) +
                       " nodes");
  }
};

namespace smart {

inline bool is_const(const Expr& e, const ExtReal& v) { return e.is_const() && e.value() == v; }

inline Expr scale(const PosRational& c, const Expr& e) {
  if (c.value() == 1) return e;
  if (e.is_const()) return constant(realeq::scale(c, e.value()));
  if (e.op() == Op::Scale) return smart::scale(PosRational(Rational(c.value() * e.coeff().value())), e.arg(0));
  return realeq::scale(c, e);
}

inline Expr add(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return constant(realeq::add(a.value(), b.value()));
  if (is_const(a, ExtReal::pos_inf()) || is_const(b, ExtReal::pos_inf())) return pos_inf_expr();
  if (is_const(a, ExtReal(0))) return b;
  if (is_const(b, ExtReal(0))) return a;
  if (a.is_const()) return smart::add(b, a);
  if (b.is_const() && a.op() == Op::Add && a.arg(1).is_const())
    return smart::add(a.arg(0), constant(realeq::add(a.arg(1).value(), b.value())));
  return realeq::add(a, b);
}

namespace detail {

// Flattens, removes duplicates and identities, and folds constants of an
// n-ary join (is_max) or meet.
inline Expr lattice(Op op, const Expr& a, const Expr& b) {
  const bool is_max = op == Op::Max;
  const ExtReal identity = is_max ? ExtReal::neg_inf() : ExtReal::pos_inf();
  const ExtReal absorbing = is_max ? ExtReal::pos_inf() : ExtReal::neg_inf();

  std::vector<Expr> items;
  std::unordered_set<Expr, ExprHash> seen;
  bool have_const = false;
  ExtReal folded = identity;
  std::function<void(const Expr&)> collect = [&](const Expr& e) {
    if (e.op() == op) {
      collect(e.arg(0));
      collect(e.arg(1));
    } else if (e.is_const()) {
      folded = have_const ? (is_max ? realeq::max(folded, e.value()) : realeq::min(folded, e.value())) : e.value();
      have_const = true;
    } else if (seen.insert(e).second) {
      items.push_back(e);
    }
  };
  collect(a);
  collect(b);

  if (have_const && folded == absorbing) return constant(absorbing);
  if (have_const && !(folded == identity)) items.push_back(constant(folded));
  if (items.empty()) return constant(identity);
  if (items.size() == 1) return items.front();
  Expr acc = items.back();
  for (std::size_t i = items.size() - 1; i-- > 0;)
    acc = Expr::make(op, {}, {}, PosRational(1), {items[i], acc});
  return acc;
}

}  // namespace detail

inline Expr max(const Expr& a, const Expr& b) { return detail::lattice(Op::Max, a, b); }
inline Expr min(const Expr& a, const Expr& b) { return detail::lattice(Op::Min, a, b); }

inline Expr cond(const Expr& g, const Expr& a, const Expr& b) {
  if (g.is_const()) return g.value() <= ExtReal(0) ? smart::min(a, b) : b;
  if (a == b || is_const(a, ExtReal::pos_inf())) return b;
  if (is_const(b, ExtReal::neg_inf())) return b;
  return realeq::cond(g, a, b);
}

inline Expr conda(const Expr& g, const Expr& a, const Expr& b) {
  if (g.is_const()) return g.value() < ExtReal(0) ? a : smart::max(a, b);
  if (a == b || is_const(b, ExtReal::neg_inf())) return a;
  if (is_const(a, ExtReal::pos_inf())) return a;
  return realeq::conda(g, a, b);
}

inline Expr eq_inf(const Expr& e) {
  if (e.is_const()) return constant(realeq::eq_inf(e.value()));
  if (e.op() == Op::EqInf || e.op() == Op::EqNegInf) return e;
  if (e.op() == Op::Scale) return smart::eq_inf(e.arg(0));
  return realeq::eq_inf(e);
}

inline Expr eq_neg_inf(const Expr& e) {
  if (e.is_const()) return constant(realeq::eq_neg_inf(e.value()));
  if (e.op() == Op::EqInf || e.op() == Op::EqNegInf) return e;
  if (e.op() == Op::Scale) return smart::eq_neg_inf(e.arg(0));
  return realeq::eq_neg_inf(e);
}

inline Expr neg(const Expr& e) {
  if (e.is_const()) return constant(negate(e.value()));
  if (e.op() == Op::Neg) return e.arg(0);
  return realeq::neg(e);
}

/// Rebuilds a node from already simplified children.
inline Expr rebuild(const Expr& e, const std::vector<Expr>& args) {
  switch (e.op()) {
    case Op::Var:
    case Op::Const: return e;
    case Op::Scale: return smart::scale(e.coeff(), args[0]);
    case Op::Add: return smart::add(args[0], args[1]);
    case Op::Min: return smart::min(args[0], args[1]);
    case Op::Max: return smart::max(args[0], args[1]);
    case Op::Cond: return smart::cond(args[0], args[1], args[2]);
    case Op::CondA: return smart::conda(args[0], args[1], args[2]);
    case Op::EqInf: return smart::eq_inf(args[0]);
    case Op::EqNegInf: return smart::eq_neg_inf(args[0]);
    case Op::Neg: return smart::neg(args[0]);
  }
  return e;
}

}  // namespace smart

/// Bottom-up simplification: constant folding, flattening and deduplication
/// of joins and meets, lattice identities, scaling collapse and the
/// conditional laws with constant guards or equal branches.
inline Expr simplify(const Expr& e) {
  std::unordered_map<const Expr::Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& cur) -> Expr {
    if (cur.num_args() == 0) return cur;
    if (auto it = memo.find(cur.id()); it != memo.end()) return it->second;
    std::vector<Expr> args;
    args.reserve(cur.num_args());
    for (int i = 0; i < cur.num_args(); ++i) args.push_back(go(cur.arg(i)));
    Expr out = smart::rebuild(cur, args);
    memo.emplace(cur.id(), out);
    return out;
  };
  return go(e);
}

/// Substitution followed by simplification of the rebuilt spine.
inline Expr substitute_simplify(const Expr& e, const std::map<std::string, Expr>& bindings) {
  std::unordered_map<const Expr::Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& cur) -> Expr {
    if (cur.is_var()) {
      auto it = bindings.find(cur.name());
      return it == bindings.end() ? cur : it->second;
    }
    if (cur.num_args() == 0) return cur;
    if (auto it = memo.find(cur.id()); it != memo.end()) return it->second;
    std::vector<Expr> args;
    args.reserve(cur.num_args());
    bool changed = false;
    for (int i = 0; i < cur.num_args(); ++i) {
      args.push_back(go(cur.arg(i)));
      if (args.back().id() != cur.arg(i).id()) changed = true;
    }
    Expr out = changed ? smart::rebuild(cur, args) : cur;
    memo.emplace(cur.id(), out);
    return out;
  };
  return go(e);
}

inline Expr substitute_simplify(const Expr& e, const std::string& name, const Expr& replacement) {
  return substitute_simplify(e, std::map<std::string, Expr>{{name, replacement}});
}

}  // namespace realeq
