#pragma once

// Simple conjunctive/disjunctive normal forms over linear atoms
//   sum_X c_X * X + sum_{X in T} eqninf(X) + d
// and full normal forms: trees of cond/conda nodes whose guards are simple
// normal forms and whose leaves are simple normal forms.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "realeq/expr.hpp"
#include "realeq/simplify.hpp"

namespace realeq {

enum class Polarity { CNF, DNF };

inline const char* to_string(Polarity p) { return p == Polarity::CNF ? "cnf" : "dnf"; }

struct LinearAtom {
  std::map<std::string, PosRational> coeffs;
  std::set<std::string> tests;  // variables X contributing eqninf(X)
  ExtReal constant;

  static LinearAtom of_var(const std::string& name) {
    LinearAtom a;
    a.coeffs.emplace(name, PosRational(1));
    return a;
  }
  static LinearAtom of_const(ExtReal d) {
    LinearAtom a;
    a.constant = std::move(d);
    return a;
  }

  bool is_constant() const { return coeffs.empty() && tests.empty(); }
  bool same_shape(const LinearAtom& o) const { return coeffs == o.coeffs && tests == o.tests; }
  std::size_t size() const { return 1 + coeffs.size() + tests.size(); }

  ExtReal evaluate(const Valuation& eta) const {
    ExtReal sum = constant;
    for (const auto& [x, c] : coeffs) sum = add(sum, scale(c, eta(x)));
    for (const auto& x : tests) sum = add(sum, eq_neg_inf(eta(x)));
    return sum;
  }

  Expr to_expr() const {
    std::vector<Expr> terms;
    for (const auto& [x, c] : coeffs) terms.push_back(c.value() == 1 ? var(x) : scale(c, var(x)));
    for (const auto& x : tests) terms.push_back(eq_neg_inf(var(x)));
    if (terms.empty() || !(constant == ExtReal(0))) terms.push_back(realeq::constant(constant));
    Expr acc = terms.back();
    for (std::size_t i = terms.size() - 1; i-- > 0;) acc = add(terms[i], acc);
    return acc;
  }

  friend bool operator==(const LinearAtom&, const LinearAtom&) = default;
};

/// Canonical atom order: atoms mentioning variables first (by variables,
/// coefficients, tests, constant), pure constants last.
inline bool atom_less(const LinearAtom& a, const LinearAtom& b) {
  bool av = !a.is_constant();
  bool bv = !b.is_constant();
  if (av != bv) return av;
  if (a.coeffs != b.coeffs) return a.coeffs < b.coeffs;
  if (a.tests != b.tests) return a.tests < b.tests;
  return a.constant < b.constant;
}

using Clause = std::vector<LinearAtom>;

inline bool clause_less(const Clause& a, const Clause& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), atom_less);
}

/// CNF: meet of joins of atoms. DNF: join of meets of atoms.
struct SimpleNF {
  Polarity polarity = Polarity::CNF;
  std::vector<Clause> clauses;

  static SimpleNF top(Polarity p) {  // inf
    SimpleNF s{p, {}};
    if (p == Polarity::DNF) s.clauses.emplace_back();
    return s;
  }
  static SimpleNF bottom(Polarity p) {  // -inf
    SimpleNF s{p, {}};
    if (p == Polarity::CNF) s.clauses.emplace_back();
    return s;
  }

  std::size_t size() const {
    std::size_t n = 1;
    for (const Clause& c : clauses)
      for (const LinearAtom& a : c) n += a.size();
    return n;
  }

  ExtReal evaluate(const Valuation& eta) const {
    const bool cnf = polarity == Polarity::CNF;
    ExtReal outer = cnf ? ExtReal::pos_inf() : ExtReal::neg_inf();
    for (const Clause& c : clauses) {
      ExtReal inner = cnf ? ExtReal::neg_inf() : ExtReal::pos_inf();
      for (const LinearAtom& a : c) inner = cnf ? max(inner, a.evaluate(eta)) : min(inner, a.evaluate(eta));
      outer = cnf ? min(outer, inner) : max(outer, inner);
    }
    return outer;
  }

  Expr to_expr() const {
    std::vector<Expr> outer;
    for (const Clause& c : clauses) {
      std::vector<Expr> inner;
      for (const LinearAtom& a : c) inner.push_back(a.to_expr());
      outer.push_back(polarity == Polarity::CNF ? join_all(inner) : meet_all(inner));
    }
    return polarity == Polarity::CNF ? meet_all(outer) : join_all(outer);
  }

  /// The value when the form denotes a constant (after simplification).
  std::optional<ExtReal> constant_value() const {
    if (clauses.empty()) return polarity == Polarity::CNF ? ExtReal::pos_inf() : ExtReal::neg_inf();
    if (clauses.size() != 1) return std::nullopt;
    const Clause& c = clauses.front();
    if (c.empty()) return polarity == Polarity::CNF ? ExtReal::neg_inf() : ExtReal::pos_inf();
    if (c.size() == 1 && c.front().is_constant()) return c.front().constant;
    return std::nullopt;
  }

  std::set<std::string> variables() const {
    std::set<std::string> vars;
    for (const Clause& c : clauses)
      for (const LinearAtom& a : c) {
        for (const auto& kv : a.coeffs) vars.insert(kv.first);
        vars.insert(a.tests.begin(), a.tests.end());
      }
    return vars;
  }

  friend bool operator==(const SimpleNF&, const SimpleNF&) = default;
};

namespace detail {

// Merges same-shape atoms of one inner clause. Returns false when the clause
// equals the absorbing element of the inner operation (inf for a CNF join,
// -inf for a DNF meet).
inline bool simplify_clause(Clause& clause, Polarity p) {
  const bool cnf = p == Polarity::CNF;
  Clause out;
  for (LinearAtom& a : clause) {
    if (a.constant.is_pos_inf()) {
      if (cnf) return false;
      continue;
    }
    if (a.is_constant() && a.constant.is_neg_inf()) {
      if (!cnf) return false;
      continue;
    }
    auto same = std::find_if(out.begin(), out.end(), [&](const LinearAtom& b) { return b.same_shape(a); });
    if (same == out.end()) {
      out.push_back(std::move(a));
    } else if (cnf ? same->constant < a.constant : a.constant < same->constant) {
      same->constant = a.constant;
    }
  }
  std::sort(out.begin(), out.end(), atom_less);
  clause = std::move(out);
  return true;
}

// True when clause `a` makes clause `b` redundant in the outer operation.
inline bool absorbs(const Clause& a, const Clause& b, Polarity p) {
  const bool cnf = p == Polarity::CNF;
  for (const LinearAtom& x : a) {
    bool found = false;
    for (const LinearAtom& y : b) {
      if (!y.same_shape(x)) continue;
      found = cnf ? x.constant <= y.constant : y.constant <= x.constant;
      break;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace detail

/// Merges same-shape atoms, drops identities, absorbs redundant clauses and
/// sorts everything canonically.
inline SimpleNF simplify(SimpleNF s) {
  std::vector<Clause> kept;
  for (Clause& c : s.clauses) {
    if (!detail::simplify_clause(c, s.polarity)) continue;  // identity of the outer operation
    if (c.empty()) return SimpleNF{s.polarity, {Clause{}}};  // absorbing element of the outer operation
    kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(), [](const Clause& a, const Clause& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return clause_less(a, b);
  });
  std::vector<Clause> result;
  for (Clause& c : kept) {
    bool redundant = false;
    for (const Clause& r : result)
      if (detail::absorbs(r, c, s.polarity)) {
        redundant = true;
        break;
      }
    if (!redundant) result.push_back(std::move(c));
  }
  std::sort(result.begin(), result.end(), clause_less);
  return SimpleNF{s.polarity, std::move(result)};
}

// Algebra on simple normal forms of equal polarity. All results are simplified.

namespace detail {

inline SimpleNF concat(const SimpleNF& a, const SimpleNF& b) {
  SimpleNF out{a.polarity, a.clauses};
  out.clauses.insert(out.clauses.end(), b.clauses.begin(), b.clauses.end());
  return simplify(std::move(out));
}

inline SimpleNF cross(const SimpleNF& a, const SimpleNF& b, const Options& opts) {
  opts.check(a.clauses.size() * b.clauses.size(), "normal form");
  SimpleNF out{a.polarity, {}};
  std::size_t total = 0;
  for (const Clause& x : a.clauses)
    for (const Clause& y : b.clauses) {
      Clause c = x;
      c.insert(c.end(), y.begin(), y.end());
      total += c.size();
      opts.check(total, "normal form");
      out.clauses.push_back(std::move(c));
    }
  return simplify(std::move(out));
}

inline LinearAtom add_atoms(const LinearAtom& a, const LinearAtom& b) {
  LinearAtom r = a;
  for (const auto& [x, c] : b.coeffs) {
    auto it = r.coeffs.find(x);
    if (it == r.coeffs.end())
      r.coeffs.emplace(x, c);
    else
      it->second = PosRational(Rational(it->second.value() + c.value()));
  }
  r.tests.insert(b.tests.begin(), b.tests.end());
  r.constant = add(a.constant, b.constant);
  return r;
}

}  // namespace detail

inline SimpleNF snf_max(const SimpleNF& a, const SimpleNF& b, const Options& opts = {}) {
  return a.polarity == Polarity::CNF ? detail::cross(a, b, opts) : detail::concat(a, b);
}

inline SimpleNF snf_min(const SimpleNF& a, const SimpleNF& b, const Options& opts = {}) {
  return a.polarity == Polarity::CNF ? detail::concat(a, b) : detail::cross(a, b, opts);
}

inline SimpleNF snf_atom(Polarity p, LinearAtom a) { return simplify(SimpleNF{p, {Clause{std::move(a)}}}); }

inline SimpleNF snf_const(Polarity p, ExtReal d) { return snf_atom(p, LinearAtom::of_const(std::move(d))); }

/// Addition distributes over both lattice operations: pairwise sums of
/// clauses, and within a pair, pairwise sums of atoms.
inline SimpleNF snf_add(const SimpleNF& a, const SimpleNF& b, const Options& opts = {}) {
  // An empty join is -inf, which does not absorb under addition (-inf + inf = inf),
  // so it takes part as an explicit -inf atom.
  auto explicit_joins = [](const SimpleNF& s) {
    std::vector<Clause> cs = s.clauses;
    if (s.polarity == Polarity::CNF) {
      for (Clause& c : cs)
        if (c.empty()) c.push_back(LinearAtom::of_const(ExtReal::neg_inf()));
    } else if (cs.empty()) {
      cs.push_back(Clause{LinearAtom::of_const(ExtReal::neg_inf())});
    }
    return cs;
  };
  const std::vector<Clause> xs = explicit_joins(a), ys = explicit_joins(b);
  opts.check(xs.size() * ys.size(), "normal form");
  SimpleNF out{a.polarity, {}};
  std::size_t total = 0;
  for (const Clause& x : xs)
    for (const Clause& y : ys) {
      Clause c;
      for (const LinearAtom& u : x)
        for (const LinearAtom& v : y) c.push_back(detail::add_atoms(u, v));
      total += c.size();
      opts.check(total, "normal form");
      out.clauses.push_back(std::move(c));
    }
  return simplify(std::move(out));
}

inline SimpleNF snf_scale(const PosRational& k, const SimpleNF& a) {
  SimpleNF out = a;
  for (Clause& c : out.clauses)
    for (LinearAtom& atom : c) {
      for (auto& kv : atom.coeffs) kv.second = PosRational(Rational(kv.second.value() * k.value()));
      atom.constant = scale(k, atom.constant);
    }
  return simplify(std::move(out));
}

/// eqinf(e) = e + (-inf)
inline SimpleNF snf_eq_inf(const SimpleNF& a, const Options& opts = {}) {
  return snf_add(a, snf_const(a.polarity, ExtReal::neg_inf()), opts);
}

/// eqninf distributes over both lattice operations; on a single atom
///   eqninf(t1 + ... + tk) = (eqninf(t1) /\ ... /\ eqninf(tk)) \/ eqinf(t1) \/ ... \/ eqinf(tk).
inline SimpleNF snf_eq_neg_inf(const SimpleNF& a, const Options& opts = {}) {
  const Polarity p = a.polarity;
  auto atom_case = [&](const LinearAtom& atom) {
    SimpleNF meet = SimpleNF::top(p);
    SimpleNF join = SimpleNF::bottom(p);
    auto term = [&](const SimpleNF& neg_part, const SimpleNF& pos_part) {
      meet = snf_min(meet, neg_part, opts);
      join = snf_max(join, pos_part, opts);
    };
    for (const auto& kv : atom.coeffs) {
      LinearAtom test;
      test.tests.insert(kv.first);
      LinearAtom shifted = LinearAtom::of_var(kv.first);
      shifted.constant = ExtReal::neg_inf();
      term(snf_atom(p, test), snf_atom(p, shifted));
    }
    for (const auto& x : atom.tests) {
      LinearAtom test;
      test.tests.insert(x);
      term(snf_atom(p, test), snf_atom(p, test));
    }
    term(snf_const(p, eq_neg_inf(atom.constant)), snf_const(p, eq_inf(atom.constant)));
    return snf_max(meet, join, opts);
  };
  const bool cnf = p == Polarity::CNF;
  SimpleNF outer = cnf ? SimpleNF::top(p) : SimpleNF::bottom(p);
  for (const Clause& c : a.clauses) {
    SimpleNF inner = cnf ? SimpleNF::bottom(p) : SimpleNF::top(p);
    for (const LinearAtom& atom : c)
      inner = cnf ? snf_max(inner, atom_case(atom), opts) : snf_min(inner, atom_case(atom), opts);
    outer = cnf ? snf_min(outer, inner, opts) : snf_max(outer, inner, opts);
  }
  return outer;
}

/// Lemma-1 style normalization of a conditional-free expression.
inline SimpleNF to_simple_nf(const Expr& e, Polarity p, const Options& opts = {}) {
  std::unordered_map<const Expr::Node*, SimpleNF> memo;
  std::function<SimpleNF(const Expr&)> go = [&](const Expr& cur) -> SimpleNF {
    if (auto it = memo.find(cur.id()); it != memo.end()) return it->second;
    SimpleNF out;
    switch (cur.op()) {
      case Op::Var: out = snf_atom(p, LinearAtom::of_var(cur.name())); break;
      case Op::Const: out = snf_const(p, cur.value()); break;
      case Op::Scale: out = snf_scale(cur.coeff(), go(cur.arg(0))); break;
      case Op::Add: out = snf_add(go(cur.arg(0)), go(cur.arg(1)), opts); break;
      case Op::Min: out = snf_min(go(cur.arg(0)), go(cur.arg(1)), opts); break;
      case Op::Max: out = snf_max(go(cur.arg(0)), go(cur.arg(1)), opts); break;
      case Op::EqInf: out = snf_eq_inf(go(cur.arg(0)), opts); break;
      case Op::EqNegInf: out = snf_eq_neg_inf(go(cur.arg(0)), opts); break;
      case Op::Cond:
      case Op::CondA: throw ConditionalPresent("simple normal form requested for an expression with a conditional");
      case Op::Neg: throw NegationPresent("normal form requested for an expression with negation");
    }
    opts.check(out.size(), "normal form");
    memo.emplace(cur.id(), out);
    return out;
  };
  return go(e);
}

// ---------------------------------------------------------------------------
// Full normal forms.

class NF {
 public:
  enum class Kind { Leaf, Cond, CondA };

  static NF leaf(SimpleNF s) {
    auto d = std::make_shared<Data>();
    d->kind = Kind::Leaf;
    d->size = s.size();
    d->nf = std::move(s);
    return NF(std::move(d));
  }

  /// Raw conditional node; see make_cond() for the folding variant.
  static NF node(Kind kind, SimpleNF guard, NF then_branch, NF else_branch) {
    if (kind == Kind::Leaf) throw InvalidArgument("conditional node needs a conditional kind");
    auto d = std::make_shared<Data>();
    d->kind = kind;
    std::size_t size = guard.size();
    for (std::size_t part : {then_branch.size(), else_branch.size()})
      size = part > SIZE_MAX - size ? SIZE_MAX : size + part;
    d->size = size;
    d->nf = std::move(guard);
    d->then_branch = std::move(then_branch.d_);
    d->else_branch = std::move(else_branch.d_);
    return NF(std::move(d));
  }

  Kind kind() const { return d_->kind; }
  bool is_leaf() const { return d_->kind == Kind::Leaf; }
  const SimpleNF& simple() const { return d_->nf; }  // leaf form
  const SimpleNF& guard() const { return d_->nf; }   // conditional guard
  NF then_branch() const { return NF(d_->then_branch); }
  NF else_branch() const { return NF(d_->else_branch); }
  Polarity polarity() const { return d_->nf.polarity; }
  /// Tree size, shared subtrees counted per occurrence (saturating).
  std::size_t size() const { return d_->size; }
  const void* id() const { return d_.get(); }

  ExtReal evaluate(const Valuation& eta) const {
    if (is_leaf()) return simple().evaluate(eta);
    ExtReal g = guard().evaluate(eta);
    if (kind() == Kind::Cond) return cond(g, then_branch().evaluate(eta), else_branch().evaluate(eta));
    return conda(g, then_branch().evaluate(eta), else_branch().evaluate(eta));
  }

  Expr to_expr() const {
    std::unordered_map<const void*, Expr> memo;
    return to_expr(memo);
  }

  /// Maximal nesting depth of conditionals.
  int depth() const {
    if (is_leaf()) return 0;
    return 1 + std::max(then_branch().depth(), else_branch().depth());
  }

  friend bool operator==(const NF& a, const NF& b) {
    if (a.d_ == b.d_) return true;
    if (a.kind() != b.kind() || a.size() != b.size() || !(a.d_->nf == b.d_->nf)) return false;
    if (a.is_leaf()) return true;
    return a.then_branch() == b.then_branch() && a.else_branch() == b.else_branch();
  }

 private:
  struct Data {
    Kind kind = Kind::Leaf;
    SimpleNF nf;
    std::shared_ptr<const Data> then_branch;
    std::shared_ptr<const Data> else_branch;
    std::size_t size = 1;
  };

  explicit NF(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  Expr to_expr(std::unordered_map<const void*, Expr>& memo) const {
    if (auto it = memo.find(id()); it != memo.end()) return it->second;
    Expr out = is_leaf() ? simple().to_expr()
               : kind() == Kind::Cond
                   ? cond(guard().to_expr(), then_branch().to_expr(memo), else_branch().to_expr(memo))
                   : conda(guard().to_expr(), then_branch().to_expr(memo), else_branch().to_expr(memo));
    memo.emplace(id(), out);
    return out;
  }

  std::shared_ptr<const Data> d_;
};

namespace detail {

template <class LeafOp>
NF nf_map(const NF& n, LeafOp op, std::unordered_map<const void*, NF>& memo) {
  if (auto it = memo.find(n.id()); it != memo.end()) return it->second;
  NF out = n.is_leaf() ? NF::leaf(op(n.simple()))
                       : NF::node(n.kind(), n.guard(), nf_map(n.then_branch(), op, memo),
                                  nf_map(n.else_branch(), op, memo));
  memo.emplace(n.id(), out);
  return out;
}

}  // namespace detail

inline NF make_cond(NF::Kind kind, SimpleNF guard, NF then_branch, NF else_branch, const Options& opts = {});

/// Applies a binary leaf operation, pushing it into conditional branches
/// (left operand first).
template <class LeafOp>
NF nf_binary(const NF& a, const NF& b, LeafOp op, const Options& opts) {
  std::map<std::pair<const void*, const void*>, NF> memo;
  std::function<NF(const NF&, const NF&)> go = [&](const NF& x, const NF& y) -> NF {
    auto key = std::make_pair(x.id(), y.id());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    NF out = NF::leaf(SimpleNF{});
    if (!x.is_leaf())
      out = make_cond(x.kind(), x.guard(), go(x.then_branch(), y), go(x.else_branch(), y), opts);
    else if (!y.is_leaf())
      out = make_cond(y.kind(), y.guard(), go(x, y.then_branch()), go(x, y.else_branch()), opts);
    else
      out = NF::leaf(op(x.simple(), y.simple()));
    opts.check(out.size(), "normal form");
    memo.emplace(key, out);
    return out;
  };
  return go(a, b);
}

inline NF nf_min(const NF& a, const NF& b, const Options& opts = {}) {
  return nf_binary(a, b, [&](const SimpleNF& x, const SimpleNF& y) { return snf_min(x, y, opts); }, opts);
}

inline NF nf_max(const NF& a, const NF& b, const Options& opts = {}) {
  return nf_binary(a, b, [&](const SimpleNF& x, const SimpleNF& y) { return snf_max(x, y, opts); }, opts);
}

inline NF nf_add(const NF& a, const NF& b, const Options& opts = {}) {
  return nf_binary(a, b, [&](const SimpleNF& x, const SimpleNF& y) { return snf_add(x, y, opts); }, opts);
}

/// Conditional node with constant guards folded and equal branches merged.
inline NF make_cond(NF::Kind kind, SimpleNF guard, NF then_branch, NF else_branch, const Options& opts) {
  if (auto g = guard.constant_value()) {
    if (kind == NF::Kind::Cond) return *g <= ExtReal(0) ? nf_min(then_branch, else_branch, opts) : else_branch;
    return *g < ExtReal(0) ? then_branch : nf_max(then_branch, else_branch, opts);
  }
  if (then_branch == else_branch) return then_branch;
  if (then_branch.is_leaf() && else_branch.is_leaf()) {
    const SimpleNF& a = then_branch.simple();
    const SimpleNF& b = else_branch.simple();
    if (kind == NF::Kind::Cond && snf_min(a, b, opts) == b) return else_branch;
    if (kind == NF::Kind::CondA && snf_max(a, b, opts) == a) return then_branch;
  }
  return NF::node(kind, std::move(guard), std::move(then_branch), std::move(else_branch));
}

namespace detail {

// Removes conditionals decided by an enclosing one. Below the then-branch of
// cond(g, a, b) only g <= 0 matters; below the else-branch of conda(g, a, b)
// only g >= 0 does.
class Pruner {
 public:
  Pruner(const Options& opts, bool grow) : opts_(opts), grow_(grow) {}

  NF run(const NF& n) { return go(n, {}); }

 private:
  struct Fact {
    std::size_t guard;
    bool ge;  // g >= 0 when set, g <= 0 otherwise
    friend bool operator==(const Fact&, const Fact&) = default;
  };

  std::size_t guard_id(const SimpleNF& g) {
    for (std::size_t i = 0; i < guards_.size(); ++i)
      if (guards_[i] == g) return i;
    guards_.push_back(g);
    return guards_.size() - 1;
  }

  static bool knows(const std::vector<Fact>& ctx, Fact f) { return std::find(ctx.begin(), ctx.end(), f) != ctx.end(); }

  static std::string key(const NF& n, const std::vector<Fact>& ctx) {
    std::string k = std::to_string(reinterpret_cast<std::uintptr_t>(n.id()));
    for (const Fact& f : ctx) k += (f.ge ? '+' : '-') + std::to_string(f.guard);
    return k;
  }

  // Merged branches, unless the merge grows past the node it replaces.
  template <class F>
  std::optional<NF> bounded(const NF& n, F merge) {
    const std::size_t limit =
        grow_ ? std::min(opts_.max_term_size, std::max<std::size_t>(2 * n.size(), 1000)) : n.size();
    Options local;
    local.max_term_size = limit;
    try {
      NF m = merge(local);
      if (m.size() <= limit) return m;
    } catch (const TermBlowup&) {
    }
    return std::nullopt;
  }

  NF go(const NF& n, std::vector<Fact> ctx) {
    if (n.is_leaf()) return n;
    std::string k = key(n, ctx);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second.second;
    const std::size_t g = guard_id(n.guard());
    NF out = n;
    std::optional<NF> merged;
    if (merges_ < kMaxMerges) {
      if (n.kind() == NF::Kind::Cond && knows(ctx, {g, false}))
        merged = bounded(n, [&](const Options& o) { return nf_min(n.then_branch(), n.else_branch(), o); });
      else if (n.kind() == NF::Kind::CondA && knows(ctx, {g, true}))
        merged = bounded(n, [&](const Options& o) { return nf_max(n.then_branch(), n.else_branch(), o); });
    }
    if (merged) {
      ++merges_;
      out = go(*merged, ctx);
      --merges_;
    } else {
      std::vector<Fact> inner = ctx;
      Fact f{g, n.kind() == NF::Kind::CondA};
      if (!knows(inner, f)) inner.push_back(f);
      NF a = n.kind() == NF::Kind::Cond ? go(n.then_branch(), inner) : go(n.then_branch(), ctx);
      NF b = n.kind() == NF::Kind::CondA ? go(n.else_branch(), inner) : go(n.else_branch(), ctx);
      out = make_cond(n.kind(), n.guard(), a, b, opts_);
    }
    memo_.emplace(k, std::make_pair(n, out));
    return out;
  }

  static constexpr int kMaxMerges = 16;

  const Options& opts_;
  bool grow_;
  int merges_ = 0;
  std::vector<SimpleNF> guards_;
  std::unordered_map<std::string, std::pair<NF, NF>> memo_;
};

}  // namespace detail

/// Drops conditionals whose outcome is fixed by an enclosing conditional.
inline NF prune(const NF& n, const Options& opts = {}) { return detail::Pruner(opts, true).run(n); }

/// Re-applies the folding rules throughout a tree.
inline NF simplify(const NF& n, const Options& opts = {}) {
  if (n.is_leaf()) return NF::leaf(simplify(n.simple()));
  return make_cond(n.kind(), simplify(n.guard()), simplify(n.then_branch(), opts), simplify(n.else_branch(), opts),
                   opts);
}

// ---------------------------------------------------------------------------
// Guard normalization. A conditional guard that is itself a conditional tree
// is turned into a predicate over simple forms, "P <= 0" or "P < 0",
// combined with and/or; same-strictness atoms merge (P<=0 and Q<=0 iff
// P\/Q <= 0; P<=0 or Q<=0 iff P/\Q <= 0).

namespace detail {

struct Pred {
  enum class Kind { Atom, And, Or };
  Kind kind = Kind::Atom;
  bool strict = false;
  std::optional<SimpleNF> nf;
  std::shared_ptr<const Pred> lhs, rhs;
};
using PredPtr = std::shared_ptr<const Pred>;

inline PredPtr pred_atom(SimpleNF nf, bool strict) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::Kind::Atom;
  p->strict = strict;
  p->nf = std::move(nf);
  return p;
}

inline PredPtr pred_combine(Pred::Kind kind, PredPtr a, PredPtr b, const Options& opts) {
  if (a->kind == Pred::Kind::Atom && b->kind == Pred::Kind::Atom && a->strict == b->strict)
    return pred_atom(kind == Pred::Kind::And ? snf_max(*a->nf, *b->nf, opts) : snf_min(*a->nf, *b->nf, opts),
                     a->strict);
  auto p = std::make_shared<Pred>();
  p->kind = kind;
  p->lhs = std::move(a);
  p->rhs = std::move(b);
  return p;
}

// Predicate "n <= 0" (strict: "n < 0").
inline PredPtr pred_of(const NF& n, bool strict, const Options& opts) {
  if (n.is_leaf()) return pred_atom(n.simple(), strict);
  PredPtr a = pred_of(n.then_branch(), strict, opts);
  PredPtr b = pred_of(n.else_branch(), strict, opts);
  if (n.kind() == NF::Kind::Cond)  // cond(h,a,b) <= 0  iff  b <= 0 or (h <= 0 and a <= 0)
    return pred_combine(Pred::Kind::Or, b, pred_combine(Pred::Kind::And, pred_atom(n.guard(), false), a, opts), opts);
  // conda(h,a,b) <= 0  iff  a <= 0 and (h < 0 or b <= 0)
  return pred_combine(Pred::Kind::And, a, pred_combine(Pred::Kind::Or, pred_atom(n.guard(), true), b, opts), opts);
}

// Tree equal to `low` where the predicate holds and `high` elsewhere; requires low <= high.
template <class T, class Make>
T emit(const PredPtr& p, const T& low, const T& high, Make make) {
  switch (p->kind) {
    case Pred::Kind::Atom: return make(p->strict, *p->nf, low, high);
    case Pred::Kind::And: return emit(p->lhs, emit(p->rhs, low, high, make), high, make);
    case Pred::Kind::Or: return emit(p->lhs, low, emit(p->rhs, low, high, make), make);
  }
  return high;
}

}  // namespace detail

/// Full normal form of a negation-free expression.
inline NF to_nf(const Expr& e, Polarity p, const Options& opts = {}) {
  std::unordered_map<const Expr::Node*, NF> memo;
  auto make = [&](bool strict, const SimpleNF& g, const NF& lo, const NF& hi) {
    return make_cond(strict ? NF::Kind::CondA : NF::Kind::Cond, g, lo, hi, opts);
  };
  std::function<NF(const Expr&)> go = [&](const Expr& cur) -> NF {
    if (auto it = memo.find(cur.id()); it != memo.end()) return it->second;
    NF out = NF::leaf(SimpleNF{});
    auto unary = [&](auto leaf_op) {
      std::unordered_map<const void*, NF> m;
      return detail::nf_map(go(cur.arg(0)), leaf_op, m);
    };
    switch (cur.op()) {
      case Op::Var:
      case Op::Const: out = NF::leaf(to_simple_nf(cur, p, opts)); break;
      case Op::Scale: out = unary([&](const SimpleNF& s) { return snf_scale(cur.coeff(), s); }); break;
      case Op::EqInf: out = unary([&](const SimpleNF& s) { return snf_eq_inf(s, opts); }); break;
      case Op::EqNegInf: out = unary([&](const SimpleNF& s) { return snf_eq_neg_inf(s, opts); }); break;
      case Op::Add: out = nf_add(go(cur.arg(0)), go(cur.arg(1)), opts); break;
      case Op::Min: out = nf_min(go(cur.arg(0)), go(cur.arg(1)), opts); break;
      case Op::Max: out = nf_max(go(cur.arg(0)), go(cur.arg(1)), opts); break;
      case Op::Cond:
      case Op::CondA: {
        const bool is_cond = cur.op() == Op::Cond;
        NF g = go(cur.arg(0));
        NF a = go(cur.arg(1));
        NF b = go(cur.arg(2));
        if (g.is_leaf()) {
          out = make(!is_cond, g.simple(), a, b);
          break;
        }
        detail::PredPtr pred = detail::pred_of(g, !is_cond, opts);
        if (pred->kind == detail::Pred::Kind::Atom && pred->strict == !is_cond)
          out = make(!is_cond, *pred->nf, a, b);
        else if (is_cond)
          out = detail::emit(pred, nf_min(a, b, opts), b, make);
        else
          out = detail::emit(pred, a, nf_max(a, b, opts), make);
        break;
      }
      case Op::Neg: throw NegationPresent("normal form requested for an expression with negation");
    }
    if (!out.is_leaf()) out = detail::Pruner(opts, false).run(out);
    opts.check(out.size(), "normal form");
    memo.emplace(cur.id(), out);
    return out;
  };
  return prune(go(e), opts);
}

/// Rewrites a cond/conda expression so that its guard is a simple normal
/// form. Branches are kept as given; a guard that does not reduce to a single
/// comparison yields nested conditionals in branch position.
inline Expr normalize_guard(const Expr& e, Polarity p = Polarity::CNF, const Options& opts = {}) {
  if (e.op() != Op::Cond && e.op() != Op::CondA) throw NotConditional("normalize_guard expects cond or conda");
  const bool is_cond = e.op() == Op::Cond;
  NF g = to_nf(e.arg(0), p, opts);
  const Expr& a = e.arg(1);
  const Expr& b = e.arg(2);
  auto make = [](bool strict, const SimpleNF& guard, const Expr& lo, const Expr& hi) {
    return strict ? conda(guard.to_expr(), lo, hi) : cond(guard.to_expr(), lo, hi);
  };
  if (g.is_leaf()) return make(!is_cond, g.simple(), a, b);
  detail::PredPtr pred = detail::pred_of(g, !is_cond, opts);
  if (pred->kind == detail::Pred::Kind::Atom && pred->strict == !is_cond) return make(!is_cond, *pred->nf, a, b);
  if (is_cond) return detail::emit(pred, min(a, b), b, make);
  return detail::emit(pred, a, max(a, b), make);
}

}  // namespace realeq
