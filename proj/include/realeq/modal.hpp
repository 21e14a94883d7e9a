#pragma once

// Quantitative modal mu-calculus over probabilistic labelled transition
// systems, and its translation to a real equation system.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "realeq/expr.hpp"
#include "realeq/res.hpp"

namespace realeq {

class Formula {
 public:
  enum class Kind { Var, Const, Scale, Add, Or, And, Diamond, Box, Mu, Nu };

  static Formula var(std::string name) { return make(Kind::Var, std::move(name), {}, PosRational(1), {}); }
  static Formula constant(ExtReal d) { return make(Kind::Const, {}, std::move(d), PosRational(1), {}); }
  static Formula scale(PosRational c, Formula f) { return make(Kind::Scale, {}, {}, std::move(c), {std::move(f)}); }
  static Formula add(Formula a, Formula b) { return make(Kind::Add, {}, {}, PosRational(1), {std::move(a), std::move(b)}); }
  static Formula join(Formula a, Formula b) { return make(Kind::Or, {}, {}, PosRational(1), {std::move(a), std::move(b)}); }
  static Formula meet(Formula a, Formula b) { return make(Kind::And, {}, {}, PosRational(1), {std::move(a), std::move(b)}); }
  static Formula diamond(std::string action, Formula f) {
    return make(Kind::Diamond, std::move(action), {}, PosRational(1), {std::move(f)});
  }
  static Formula box(std::string action, Formula f) {
    return make(Kind::Box, std::move(action), {}, PosRational(1), {std::move(f)});
  }
  static Formula mu(std::string x, Formula f) { return make(Kind::Mu, std::move(x), {}, PosRational(1), {std::move(f)}); }
  static Formula nu(std::string x, Formula f) { return make(Kind::Nu, std::move(x), {}, PosRational(1), {std::move(f)}); }

  Kind kind() const { return n_->kind; }
  /// Variable name, bound variable of a fixpoint, or action of a modality.
  const std::string& name() const { return n_->name; }
  const ExtReal& value() const { return n_->value; }
  const PosRational& coeff() const { return n_->coeff; }
  const Formula& arg(std::size_t i) const { return n_->args[i]; }
  std::size_t num_args() const { return n_->args.size(); }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.n_ == b.n_) return true;
    return a.kind() == b.kind() && a.name() == b.name() && a.value() == b.value() && a.coeff() == b.coeff() &&
           a.n_->args == b.n_->args;
  }

 private:
  struct Node {
    Kind kind;
    std::string name;
    ExtReal value;
    PosRational coeff{1};
    std::vector<Formula> args;
  };

  static Formula make(Kind k, std::string name, ExtReal value, PosRational coeff, std::vector<Formula> args) {
    Formula f;
    f.n_ = std::make_shared<Node>(Node{k, std::move(name), std::move(value), std::move(coeff), std::move(args)});
    return f;
  }
  Formula() = default;

  std::shared_ptr<const Node> n_;
};

/// Probability distribution over states; entries are positive and sum to 1.
using Distribution = std::map<std::string, Rational>;

inline void validate_distribution(const Distribution& d) {
  if (d.empty()) throw InvalidArgument("empty distribution");
  Rational total = 0;
  for (const auto& [s, p] : d) {
    if (p <= 0) throw InvalidArgument("probability of " + s + " must be positive");
    total += p;
  }
  if (total != 1) throw InvalidArgument("probabilities sum to " + rational_to_string(total) + ", not 1");
}

/// Probabilistic labelled transition system.
class PLTS {
 public:
  /// Fixes the state order. Afterwards only declared states may be used.
  void declare_states(const std::vector<std::string>& states) {
    for (const std::string& s : states) {
      if (has_state(s)) throw InvalidArgument("state " + s + " declared twice");
      states_.push_back(s);
    }
    closed_ = true;
  }

  void set_initial(Distribution d) {
    validate_distribution(d);
    for (const auto& kv : d) use_state(kv.first);
    initial_ = std::move(d);
  }

  void add_transition(const std::string& from, const std::string& action, Distribution d) {
    validate_distribution(d);
    use_state(from);
    for (const auto& kv : d) use_state(kv.first);
    actions_.insert(action);
    auto& list = transitions_[{from, action}];
    if (std::find(list.begin(), list.end(), d) == list.end()) list.push_back(std::move(d));
  }

  /// States in declaration (or first-use) order.
  const std::vector<std::string>& states() const { return states_; }
  const std::set<std::string>& actions() const { return actions_; }
  bool has_state(const std::string& s) const { return std::find(states_.begin(), states_.end(), s) != states_.end(); }
  bool has_initial() const { return initial_.has_value(); }

  const Distribution& initial() const {
    if (!initial_) throw InvalidArgument("model has no initial distribution");
    return *initial_;
  }

  /// Distinct distributions d with  s -a-> d, in insertion order.
  const std::vector<Distribution>& successors(const std::string& s, const std::string& action) const {
    static const std::vector<Distribution> none;
    auto it = transitions_.find({s, action});
    return it == transitions_.end() ? none : it->second;
  }

  /// All transitions as (state, action, distribution), grouped by state then action.
  std::vector<std::tuple<std::string, std::string, Distribution>> transitions() const {
    std::vector<std::tuple<std::string, std::string, Distribution>> out;
    for (const std::string& s : states_)
      for (const std::string& a : actions_)
        for (const Distribution& d : successors(s, a)) out.emplace_back(s, a, d);
    return out;
  }

  friend bool operator==(const PLTS& a, const PLTS& b) {
    return a.states_ == b.states_ && a.actions_ == b.actions_ && a.initial_ == b.initial_ &&
           a.transitions_ == b.transitions_;
  }

 private:
  void use_state(const std::string& s) {
    if (has_state(s)) return;
    if (closed_) throw UnknownState("state " + s + " is not declared");
    states_.push_back(s);
  }

  std::vector<std::string> states_;
  bool closed_ = false;
  std::set<std::string> actions_;
  std::optional<Distribution> initial_;
  std::map<std::pair<std::string, std::string>, std::vector<Distribution>> transitions_;
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  enum class Code { UnboundVariable, DuplicateBinder, UnknownAction };
  Severity severity;
  Code code;
  std::string message;
};

/// Closedness, duplicate binders and (given a model) unknown actions.
inline std::vector<Diagnostic> check_formula(const Formula& f, const PLTS* model = nullptr) {
  std::vector<Diagnostic> out;
  std::set<std::string> bound_anywhere;
  std::set<std::string> reported_actions;
  std::function<void(const Formula&, std::vector<std::string>&)> go = [&](const Formula& g,
                                                                           std::vector<std::string>& scope) {
    switch (g.kind()) {
      case Formula::Kind::Var:
        if (std::find(scope.begin(), scope.end(), g.name()) == scope.end())
          out.push_back({Diagnostic::Severity::Error, Diagnostic::Code::UnboundVariable,
                         "variable " + g.name() + " is not bound by an enclosing mu or nu"});
        return;
      case Formula::Kind::Mu:
      case Formula::Kind::Nu:
        if (!bound_anywhere.insert(g.name()).second)
          out.push_back({Diagnostic::Severity::Error, Diagnostic::Code::DuplicateBinder,
                         "variable " + g.name() + " is bound more than once"});
        scope.push_back(g.name());
        go(g.arg(0), scope);
        scope.pop_back();
        return;
      case Formula::Kind::Diamond:
      case Formula::Kind::Box:
        if (model && !model->actions().count(g.name()) && reported_actions.insert(g.name()).second)
          out.push_back({Diagnostic::Severity::Warning, Diagnostic::Code::UnknownAction,
                         "action " + g.name() + " does not occur in the model; " +
                             (g.kind() == Formula::Kind::Diamond ? "diamond evaluates to -inf" : "box evaluates to inf")});
        break;
      default: break;
    }
    for (std::size_t i = 0; i < g.num_args(); ++i) go(g.arg(i), scope);
  };
  std::vector<std::string> scope;
  go(f, scope);
  return out;
}

/// Name of the equation variable for X in state s.
inline std::string state_variable(const std::string& x, const std::string& s) { return x + "." + s; }

inline const std::string& initial_variable() {
  static const std::string name = "X_init";
  return name;
}

namespace detail {

class Translator {
 public:
  explicit Translator(const PLTS& m) : m_(m) {}

  Expr rhs(const std::string& s, const Formula& f) const {
    switch (f.kind()) {
      case Formula::Kind::Var:
      case Formula::Kind::Mu:
      case Formula::Kind::Nu: return var(state_variable(f.name(), s));
      case Formula::Kind::Const: return constant(f.value());
      case Formula::Kind::Scale: return scale(f.coeff(), rhs(s, f.arg(0)));
      case Formula::Kind::Add: return add(rhs(s, f.arg(0)), rhs(s, f.arg(1)));
      case Formula::Kind::Or: return max(rhs(s, f.arg(0)), rhs(s, f.arg(1)));
      case Formula::Kind::And: return min(rhs(s, f.arg(0)), rhs(s, f.arg(1)));
      case Formula::Kind::Diamond:
      case Formula::Kind::Box: {
        std::vector<Expr> sums;
        for (const Distribution& d : m_.successors(s, f.name())) sums.push_back(weighted(d, f.arg(0)));
        return f.kind() == Formula::Kind::Diamond ? join_all(sums) : meet_all(sums);
      }
    }
    return constant(ExtReal(0));
  }

  /// sum over the support of d, in state order, of d(s') * rhs(s', f)
  Expr weighted(const Distribution& d, const Formula& f) const {
    std::vector<Expr> terms;
    for (const std::string& s : m_.states()) {
      auto it = d.find(s);
      if (it == d.end()) continue;
      Expr r = rhs(s, f);
      terms.push_back(it->second == 1 ? r : scale(PosRational(it->second), r));
    }
    Expr acc = terms.back();
    for (std::size_t i = terms.size() - 1; i-- > 0;) acc = add(terms[i], acc);
    return acc;
  }

  void equations(const Formula& f, std::vector<Equation>& out) const {
    if (f.kind() == Formula::Kind::Mu || f.kind() == Formula::Kind::Nu) {
      FixOp op = f.kind() == Formula::Kind::Mu ? FixOp::Mu : FixOp::Nu;
      for (const std::string& s : m_.states()) out.push_back(Equation{op, state_variable(f.name(), s), rhs(s, f.arg(0))});
    }
    for (std::size_t i = 0; i < f.num_args(); ++i) equations(f.arg(i), out);
  }

 private:
  const PLTS& m_;
};

}  // namespace detail

/// The system  mu X_init = sum_s d0(s) * rhs(s, phi), Eq(phi).
inline RES translate(const Formula& f, const PLTS& m) {
  for (const Diagnostic& d : check_formula(f, &m)) {
    if (d.severity != Diagnostic::Severity::Error) continue;
    if (d.code == Diagnostic::Code::DuplicateBinder) throw DuplicateBinder(d.message);
    throw UnboundVariable(d.message);
  }
  detail::Translator t(m);
  std::vector<Equation> eqs;
  eqs.push_back(Equation{FixOp::Mu, initial_variable(), t.weighted(m.initial(), f)});
  t.equations(f, eqs);
  return RES(std::move(eqs));
}

/// Value of the formula in the initial distribution of the model.
inline ExtReal evaluate_formula(const Formula& f, const PLTS& m, const Options& opts = {}) {
  return gauss_solve(translate(f, m), opts).at(initial_variable());
}

}  // namespace realeq
