#pragma once

// Independent checks of solver output.
//
// residual_check: every bound variable is mapped to a fixed point of its
// equation. univariate_fixed_point: extremal fixed point of x -> e[X:=x]
// computed from an exact piecewise-linear representation of that function,
// without using the normal forms or the closed-form solutions.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "realeq/expr.hpp"
#include "realeq/res.hpp"
#include "realeq/solver.hpp"

namespace realeq {

struct ResidualRow {
  std::string var;
  ExtReal lhs;
  ExtReal rhs;
  bool equal = false;
};

struct ResidualReport {
  std::vector<ResidualRow> rows;

  bool ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const ResidualRow& r) { return r.equal; });
  }
};

inline ResidualReport residual_check(const RES& e, const SolvedRES& s) {
  Valuation eta;
  for (const auto& [v, value] : s) eta.set(v, value);
  ResidualReport report;
  for (const Equation& eq : e.equations()) {
    auto it = s.find(eq.lhs);
    if (it == s.end()) throw MissingVariable("no value for bound variable " + eq.lhs);
    ExtReal rhs = evaluate(eq.rhs, eta);
    report.rows.push_back(ResidualRow{eq.lhs, it->second, rhs, rhs == it->second});
  }
  return report;
}

namespace detail {

// A linear function a*x + b, or a constant infinity, on an open interval.
struct Piece {
  enum class Kind { NegInf, Linear, PosInf };
  Kind kind = Kind::Linear;
  Rational a{0}, b{0};

  static Piece of(const ExtReal& v) {
    if (v.is_pos_inf()) return Piece{Kind::PosInf, 0, 0};
    if (v.is_neg_inf()) return Piece{Kind::NegInf, 0, 0};
    return Piece{Kind::Linear, 0, v.value()};
  }

  ExtReal at(const Rational& x) const {
    switch (kind) {
      case Kind::NegInf: return ExtReal::neg_inf();
      case Kind::PosInf: return ExtReal::pos_inf();
      case Kind::Linear: break;
    }
    return ExtReal(Rational(a * x + b));
  }
};

// Piecewise representation of a function on the finite reals. pieces[i]
// holds on the open interval (cuts[i-1], cuts[i]), with cuts[-1] = -inf and
// cuts[n] = inf; values at the cuts are kept exactly.
struct Pwl {
  std::vector<Rational> cuts;
  std::vector<ExtReal> at_cut;
  std::vector<Piece> pieces{Piece{}};

  static Pwl constant(const ExtReal& v) {
    Pwl p;
    p.pieces = {Piece::of(v)};
    return p;
  }

  static Pwl identity() {
    Pwl p;
    p.pieces = {Piece{Piece::Kind::Linear, 1, 0}};
    return p;
  }

  std::size_t interval_of(const Rational& x) const {
    return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
  }

  ExtReal value(const Rational& x) const {
    std::size_t i = interval_of(x);
    if (i < cuts.size() && cuts[i] == x) return at_cut[i];
    return pieces[i].at(x);
  }

  const Piece& piece_at(const Rational& x) const { return pieces[interval_of(x)]; }
};

// A point strictly inside interval i of `cuts`.
inline Rational sample_point(const std::vector<Rational>& cuts, std::size_t i) {
  if (cuts.empty()) return Rational(0);
  if (i == 0) return Rational(cuts.front() - 1);
  if (i == cuts.size()) return Rational(cuts.back() + 1);
  return Rational((cuts[i - 1] + cuts[i]) / 2);
}

inline bool strictly_inside(const std::vector<Rational>& cuts, std::size_t i, const Rational& x) {
  if (i > 0 && !(cuts[i - 1] < x)) return false;
  if (i < cuts.size() && !(x < cuts[i])) return false;
  return true;
}

inline std::vector<Rational> merge_cuts(const std::vector<const Pwl*>& parts) {
  std::vector<Rational> cuts;
  for (const Pwl* p : parts) cuts.insert(cuts.end(), p->cuts.begin(), p->cuts.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Combines operand functions pointwise. `split` adds the points where the
// choice made by `piece_op` may change inside an interval.
inline Pwl combine(const std::vector<const Pwl*>& parts,
                   const std::function<ExtReal(const std::vector<ExtReal>&)>& value_op,
                   const std::function<void(const std::vector<Piece>&, std::vector<Rational>&)>& split,
                   const std::function<Piece(const std::vector<Piece>&, const Rational&)>& piece_op) {
  std::vector<Rational> cuts = merge_cuts(parts);
  std::vector<Rational> extra;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    Rational s = sample_point(cuts, i);
    std::vector<Piece> ps;
    for (const Pwl* p : parts) ps.push_back(p->piece_at(s));
    std::vector<Rational> pts;
    split(ps, pts);
    for (const Rational& x : pts)
      if (strictly_inside(cuts, i, x)) extra.push_back(x);
  }
  cuts.insert(cuts.end(), extra.begin(), extra.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Pwl out;
  out.cuts = cuts;
  out.pieces.clear();
  for (const Rational& x : cuts) {
    std::vector<ExtReal> vs;
    for (const Pwl* p : parts) vs.push_back(p->value(x));
    out.at_cut.push_back(value_op(vs));
  }
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    Rational s = sample_point(cuts, i);
    std::vector<Piece> ps;
    for (const Pwl* p : parts) ps.push_back(p->piece_at(s));
    out.pieces.push_back(piece_op(ps, s));
  }
  return out;
}

inline void crossing(const Piece& p, const Piece& q, std::vector<Rational>& pts) {
  if (p.kind == Piece::Kind::Linear && q.kind == Piece::Kind::Linear && p.a != q.a)
    pts.push_back(Rational((q.b - p.b) / (p.a - q.a)));
}

inline void root(const Piece& p, std::vector<Rational>& pts) {
  if (p.kind == Piece::Kind::Linear && p.a != 0) pts.push_back(Rational(-p.b / p.a));
}

inline Piece smaller(const Piece& p, const Piece& q, const Rational& s) { return q.at(s) < p.at(s) ? q : p; }
inline Piece larger(const Piece& p, const Piece& q, const Rational& s) { return p.at(s) < q.at(s) ? q : p; }

inline Piece add_pieces(const Piece& p, const Piece& q) {
  if (p.kind == Piece::Kind::PosInf || q.kind == Piece::Kind::PosInf) return Piece{Piece::Kind::PosInf, 0, 0};
  if (p.kind == Piece::Kind::NegInf || q.kind == Piece::Kind::NegInf) return Piece{Piece::Kind::NegInf, 0, 0};
  return Piece{Piece::Kind::Linear, Rational(p.a + q.a), Rational(p.b + q.b)};
}

inline Pwl unary(const Pwl& u, const std::function<ExtReal(const ExtReal&)>& value_op,
                 const std::function<Piece(const Piece&)>& piece_op) {
  Pwl out = u;
  for (ExtReal& v : out.at_cut) v = value_op(v);
  for (Piece& p : out.pieces) p = piece_op(p);
  return out;
}

inline Pwl build_pwl(const Expr& e, const std::string& x, const Valuation& eta,
                     std::unordered_map<const Expr::Node*, Pwl>& memo) {
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  auto sub = [&](int i) { return build_pwl(e.arg(i), x, eta, memo); };
  auto no_split = [](const std::vector<Piece>&, std::vector<Rational>&) {};
  Pwl out;
  switch (e.op()) {
    case Op::Var: out = e.name() == x ? Pwl::identity() : Pwl::constant(eta(e.name())); break;
    case Op::Const: out = Pwl::constant(e.value()); break;
    case Op::Scale: {
      const PosRational c = e.coeff();
      out = unary(sub(0), [&](const ExtReal& v) { return scale(c, v); },
                  [&](const Piece& p) {
                    Piece q = p;
                    if (q.kind == Piece::Kind::Linear) {
                      q.a *= c.value();
                      q.b *= c.value();
                    }
                    return q;
                  });
      break;
    }
    case Op::EqInf:
      out = unary(sub(0), [](const ExtReal& v) { return eq_inf(v); },
                  [](const Piece& p) {
                    return Piece{p.kind == Piece::Kind::PosInf ? Piece::Kind::PosInf : Piece::Kind::NegInf, 0, 0};
                  });
      break;
    case Op::EqNegInf:
      out = unary(sub(0), [](const ExtReal& v) { return eq_neg_inf(v); },
                  [](const Piece& p) {
                    return Piece{p.kind == Piece::Kind::NegInf ? Piece::Kind::NegInf : Piece::Kind::PosInf, 0, 0};
                  });
      break;
    case Op::Add: {
      Pwl u = sub(0), v = sub(1);
      out = combine({&u, &v}, [](const std::vector<ExtReal>& vs) { return add(vs[0], vs[1]); }, no_split,
                    [](const std::vector<Piece>& ps, const Rational&) { return add_pieces(ps[0], ps[1]); });
      break;
    }
    case Op::Min:
    case Op::Max: {
      const bool is_min = e.op() == Op::Min;
      Pwl u = sub(0), v = sub(1);
      out = combine(
          {&u, &v}, [&](const std::vector<ExtReal>& vs) { return is_min ? min(vs[0], vs[1]) : max(vs[0], vs[1]); },
          [](const std::vector<Piece>& ps, std::vector<Rational>& pts) { crossing(ps[0], ps[1], pts); },
          [&](const std::vector<Piece>& ps, const Rational& s) {
            return is_min ? smaller(ps[0], ps[1], s) : larger(ps[0], ps[1], s);
          });
      break;
    }
    case Op::Cond:
    case Op::CondA: {
      const bool is_cond = e.op() == Op::Cond;
      Pwl g = sub(0), a = sub(1), b = sub(2);
      out = combine(
          {&g, &a, &b},
          [&](const std::vector<ExtReal>& vs) { return is_cond ? cond(vs[0], vs[1], vs[2]) : conda(vs[0], vs[1], vs[2]); },
          [](const std::vector<Piece>& ps, std::vector<Rational>& pts) {
            root(ps[0], pts);
            crossing(ps[1], ps[2], pts);
          },
          [&](const std::vector<Piece>& ps, const Rational& s) {
            ExtReal gv = ps[0].at(s);
            if (is_cond) return gv <= ExtReal(0) ? smaller(ps[1], ps[2], s) : ps[2];
            return gv < ExtReal(0) ? ps[1] : larger(ps[1], ps[2], s);
          });
      break;
    }
    case Op::Neg: throw NegationPresent("oracle input contains negation");
  }
  memo.emplace(e.id(), out);
  return out;
}

struct Candidates {
  std::vector<ExtReal> fixed;   // points with g(x) = x
  std::vector<ExtReal> probes;  // every point inspected, fixed or not
};

inline Candidates candidates(const Expr& e, const std::string& x, const Valuation& eta) {
  std::unordered_map<const Expr::Node*, Pwl> memo;
  Pwl g = build_pwl(e, x, eta, memo);
  Candidates c;
  auto probe = [&](const ExtReal& p, const ExtReal& gp) {
    c.probes.push_back(p);
    if (gp == p) c.fixed.push_back(p);
  };
  probe(ExtReal::neg_inf(), evaluate(e, eta.updated(x, ExtReal::neg_inf())));
  for (std::size_t i = 0; i <= g.cuts.size(); ++i) {
    const Piece& p = g.pieces[i];
    Rational s = sample_point(g.cuts, i);
    probe(ExtReal(s), p.at(s));
    if (p.kind == Piece::Kind::Linear && p.a != 1) {
      Rational x0 = p.b / (1 - p.a);
      if (strictly_inside(g.cuts, i, x0)) probe(ExtReal(x0), p.at(x0));
    }
    if (i < g.cuts.size()) probe(ExtReal(g.cuts[i]), g.at_cut[i]);
  }
  probe(ExtReal::pos_inf(), evaluate(e, eta.updated(x, ExtReal::pos_inf())));
  return c;
}

}  // namespace detail

/// Least (mu) or greatest (nu) r with r = e[X:=r] under eta.
inline ExtReal univariate_fixed_point(FixOp op, const std::string& x, const Expr& e, const Valuation& eta) {
  detail::Candidates c = detail::candidates(e, x, eta);
  if (c.fixed.empty()) throw std::logic_error("no fixed point found for a monotone function");
  return op == FixOp::Mu ? *std::min_element(c.fixed.begin(), c.fixed.end())
                         : *std::max_element(c.fixed.begin(), c.fixed.end());
}

inline ExtReal univariate_fixed_point(FixOp op, const ClauseDecomposition& dec, const Valuation& eta) {
  return univariate_fixed_point(op, dec.var, dec.to_expr(), eta);
}

/// Checks g(r) = r and, on every probe point x on the wrong side of r,
/// g(x) > x (mu) or g(x) < x (nu), evaluating g directly.
inline bool verify_extremal(FixOp op, const std::string& x, const Expr& e, const Valuation& eta, const ExtReal& r) {
  auto g = [&](const ExtReal& v) { return evaluate(e, eta.updated(x, v)); };
  if (!(g(r) == r)) return false;
  detail::Candidates c = detail::candidates(e, x, eta);
  std::vector<ExtReal> points = c.probes;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  // Midpoints between consecutive finite probes.
  std::vector<ExtReal> extra;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    if (points[i].is_finite() && points[i + 1].is_finite())
      extra.push_back(ExtReal(Rational((points[i].value() + points[i + 1].value()) / 2)));
  points.insert(points.end(), extra.begin(), extra.end());
  for (const ExtReal& p : points) {
    if (op == FixOp::Mu && p < r && !(p < g(p))) return false;
    if (op == FixOp::Nu && r < p && !(g(p) < p)) return false;
  }
  return true;
}

struct Discrepancy {
  std::map<std::string, ExtReal> valuation;
  ExtReal solver;
  ExtReal oracle;
};

struct CrosscheckReport {
  std::size_t trials = 0;
  std::size_t agreed = 0;
  std::optional<Discrepancy> counterexample;

  bool ok() const { return !counterexample && agreed == trials; }
};

/// Compares solve_single against univariate_fixed_point on `trials` random
/// instantiations of the variables other than X. Trials are independent and
/// deterministic in (seed, index), so the report does not depend on `jobs`.
inline CrosscheckReport crosscheck_single(FixOp op, const std::string& x, const Expr& e, std::size_t trials,
                                          std::uint64_t seed = 1, unsigned jobs = 1, const Options& opts = {}) {
  static const std::vector<ExtReal> values = {ExtReal::neg_inf(), ExtReal(-7), ExtReal(-1), ExtReal(0),
                                              ExtReal(1, 3),      ExtReal(1),  ExtReal(5),  ExtReal::pos_inf()};
  Expr sol = solve_single(op, x, e, opts).rhs;
  std::vector<std::string> others;
  for (const std::string& v : occ(e))
    if (v != x) others.push_back(v);

  auto disagree = [&](const Valuation& eta, ExtReal& s, ExtReal& o) {
    s = evaluate(sol, eta);
    o = univariate_fixed_point(op, x, e, eta);
    return !(s == o);
  };
  auto trial_valuation = [&](std::size_t t) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + t);
    Valuation eta;
    for (const std::string& v : others) eta.set(v, values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)]);
    return eta;
  };

  std::vector<char> bad(trials, 0);
  auto run = [&](std::size_t from, std::size_t step) {
    for (std::size_t t = from; t < trials; t += step) {
      ExtReal s, o;
      bad[t] = disagree(trial_valuation(t), s, o) ? 1 : 0;
    }
  };
  unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& th : pool) th.join();
  }

  CrosscheckReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    if (!bad[t]) {
      report.agreed++;
      continue;
    }
    if (report.counterexample) continue;
    // Shrink: move each variable towards simpler values while the disagreement persists.
    Valuation eta = trial_valuation(t);
    static const std::vector<ExtReal> simple = {ExtReal(0), ExtReal::neg_inf(), ExtReal::pos_inf(), ExtReal(1),
                                                ExtReal(-1)};
    for (const std::string& v : others)
      for (const ExtReal& candidate : simple) {
        if (eta(v) == candidate) break;
        ExtReal s, o;
        if (disagree(eta.updated(v, candidate), s, o)) {
          eta.set(v, candidate);
          break;
        }
      }
    Discrepancy d;
    for (const std::string& v : others) d.valuation[v] = eta(v);
    disagree(eta, d.solver, d.oracle);
    report.counterexample = d;
  }
  return report;
}

}  // namespace realeq
