#pragma once

// Text formats: RES, formula, pLTS and BES files.

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "realeq/bes.hpp"
#include "realeq/errors.hpp"
#include "realeq/expr.hpp"
#include "realeq/modal.hpp"
#include "realeq/res.hpp"

namespace realeq {

namespace detail {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

/// Splits text into tokens. With `dotted` identifiers may contain '.'.
inline std::vector<Token> tokenize(std::string_view text, bool dotted) {
  static const char* const multi[] = {"\\/", "/\\", "->", "||", "&&"};
  static const std::string_view single = "+-*(),;=.<>[]:";
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, column = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j + 1 < text.size() && text[j] == '/' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      tok.kind = Token::Kind::Number;
      advance(j - i);
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() &&
             (ident_char(text[j]) || (dotted && text[j] == '.' && j + 1 < text.size() && ident_char(text[j + 1]))))
        ++j;
      tok.kind = Token::Kind::Ident;
      advance(j - i);
    } else {
      std::size_t len = 0;
      for (const char* m : multi)
        if (text.substr(i, 2) == m) len = 2;
      if (len == 0 && single.find(c) != std::string_view::npos) len = 1;
      if (len == 0) throw ParseError(std::string("unexpected character '") + c + "'", line, column);
      tok.kind = Token::Kind::Symbol;
      advance(len);
    }
    tok.text = std::string(text.substr(start, i - start));
    out.push_back(std::move(tok));
  }
  Token end;
  end.line = line;
  end.column = column;
  out.push_back(end);
  return out;
}

inline const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {"res",  "form",   "plts", "bes",   "mu",    "nu",    "inf",
                                              "cond", "conda",  "eqinf", "eqninf", "init", "trans", "states",
                                              "true", "false"};
  return words;
}

class Parser {
 public:
  Parser(std::string_view text, bool dotted) : toks_(tokenize(text, dotted)) {}

 protected:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Symbol && peek(ahead).text == s;
  }
  bool at_word(std::string_view s) const { return peek().kind == Token::Kind::Ident && peek().text == s; }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool accept(std::string_view s) {
    if (!at_symbol(s)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw ParseError(message, at.line, at.column);
  }
  [[noreturn]] void fail(const std::string& message) const { fail(message, peek()); }

  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::End) return "end of input";
    return "'" + t.text + "'";
  }

  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "' but found " + describe(peek()));
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "' but found " + describe(peek()));
    next();
  }

  void expect_end() {
    if (!at_end()) fail("unexpected " + describe(peek()));
  }

  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || reserved_words().count(t.text)) fail(std::string("expected ") + what + " but found " + describe(t));
    return next().text;
  }

  Rational number() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Number) fail("expected a number but found " + describe(t));
    try {
      return parse_rational(next().text);
    } catch (const InvalidArgument& e) {
      fail(e.what(), t);
    }
  }

  // A literal: number or inf, optionally preceded by '-'.
  bool at_literal(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Number || (t.kind == Token::Kind::Ident && t.text == "inf");
  }

  ExtReal literal() {
    if (at_word("inf")) {
      next();
      return ExtReal::pos_inf();
    }
    return ExtReal(number());
  }

  PosRational coefficient() {
    const Token& t = peek();
    Rational c = number();
    if (c <= 0) fail("scaling coefficient must be positive", t);
    return PosRational(c);
  }

  FixOp fixop() {
    if (at_word("mu")) {
      next();
      return FixOp::Mu;
    }
    if (at_word("nu")) {
      next();
      return FixOp::Nu;
    }
    fail("expected 'mu' or 'nu' but found " + describe(peek()));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline Expr right_sum(std::vector<Expr> terms) {
  Expr acc = terms.back();
  for (std::size_t i = terms.size() - 1; i-- > 0;) acc = add(terms[i], acc);
  return acc;
}

class ExprParser : public Parser {
 public:
  using Parser::Parser;

  Expr expression() {
    Expr left = meet();
    if (accept("\\/")) return max(left, expression());
    return left;
  }

  RES system() {
    expect_word("res");
    std::vector<Equation> eqs;
    std::set<std::string> seen;
    while (!at_end()) {
      FixOp op = fixop();
      const Token& at = peek();
      std::string lhs = identifier("a variable");
      if (!seen.insert(lhs).second) fail("variable " + lhs + " is bound twice", at);
      expect("=");
      const Token& body = peek();
      Expr rhs = expression();
      expect(";");
      try {
        rhs = eliminate_negation(rhs);
      } catch (const OddNegation& e) {
        fail(e.what(), body);
      }
      eqs.push_back(Equation{op, lhs, rhs});
    }
    return RES(std::move(eqs));
  }

  void finish() { expect_end(); }

 private:
  Expr meet() {
    Expr left = sum();
    if (accept("/\\")) return min(left, meet());
    return left;
  }

  Expr sum() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept("+")) {
        terms.push_back(term());
      } else if (accept("-")) {
        Expr t = term();
        terms.push_back(t.op() == Op::Const ? constant(negate(t.value())) : neg(t));
      } else {
        break;
      }
    }
    return right_sum(std::move(terms));
  }

  Expr term() {
    if (peek().kind == Token::Kind::Number && at_symbol("*", 1)) {
      PosRational c = coefficient();
      next();
      return scale(c, term());
    }
    return unary();
  }

  Expr unary() {
    if (accept("-")) {
      if (at_literal()) return constant(negate(literal()));
      return neg(unary());
    }
    return atom();
  }

  Expr atom() {
    if (at_literal()) return constant(literal());
    if (accept("(")) {
      Expr e = expression();
      expect(")");
      return e;
    }
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident) {
      if (t.text == "cond" || t.text == "conda") {
        bool plain = t.text == "cond";
        next();
        expect("(");
        Expr g = expression();
        expect(",");
        Expr a = expression();
        expect(",");
        Expr b = expression();
        expect(")");
        return plain ? cond(g, a, b) : conda(g, a, b);
      }
      if (t.text == "eqinf" || t.text == "eqninf") {
        bool pos = t.text == "eqinf";
        next();
        expect("(");
        Expr e = expression();
        expect(")");
        return pos ? eq_inf(e) : eq_neg_inf(e);
      }
      return var(identifier("a variable"));
    }
    fail("expected an expression but found " + describe(t));
  }
};

class FormulaParser : public Parser {
 public:
  using Parser::Parser;

  Formula file() {
    expect_word("form");
    Formula f = formula();
    accept(";");
    expect_end();
    return f;
  }

  Formula formula() {
    Formula left = meet();
    if (accept("\\/")) return Formula::join(left, formula());
    return left;
  }

 private:
  Formula meet() {
    Formula left = sum();
    if (accept("/\\")) return Formula::meet(left, meet());
    return left;
  }

  Formula sum() {
    std::vector<Formula> terms{term()};
    for (;;) {
      if (accept("+")) {
        terms.push_back(term());
      } else if (at_symbol("-")) {
        next();
        if (!at_literal()) fail("only a constant may be subtracted in a formula");
        terms.push_back(Formula::constant(negate(literal())));
      } else {
        break;
      }
    }
    Formula acc = terms.back();
    for (std::size_t i = terms.size() - 1; i-- > 0;) acc = Formula::add(terms[i], acc);
    return acc;
  }

  Formula term() {
    if (peek().kind == Token::Kind::Number && at_symbol("*", 1)) {
      PosRational c = coefficient();
      next();
      return Formula::scale(c, term());
    }
    return prefix();
  }

  Formula prefix() {
    if (accept("<")) {
      std::string a = identifier("an action");
      expect(">");
      return Formula::diamond(a, prefix());
    }
    if (accept("[")) {
      std::string a = identifier("an action");
      expect("]");
      return Formula::box(a, prefix());
    }
    if (at_word("mu") || at_word("nu")) {
      FixOp op = fixop();
      std::string x = identifier("a variable");
      expect(".");
      Formula body = formula();
      return op == FixOp::Mu ? Formula::mu(x, body) : Formula::nu(x, body);
    }
    return atom();
  }

  Formula atom() {
    if (accept("-")) {
      if (!at_literal()) fail("expected a constant after '-'");
      return Formula::constant(negate(literal()));
    }
    if (at_literal()) return Formula::constant(literal());
    if (accept("(")) {
      Formula f = formula();
      expect(")");
      return f;
    }
    return Formula::var(identifier("a formula"));
  }
};

class PltsParser : public Parser {
 public:
  using Parser::Parser;

  PLTS file() {
    expect_word("plts");
    PLTS m;
    bool seen_init = false;
    bool seen_states = false;
    bool seen_trans = false;
    while (!at_end()) {
      const Token& at = peek();
      if (at_word("states")) {
        if (seen_states || seen_init || seen_trans) fail("'states' must come first and only once", at);
        next();
        std::vector<std::string> states{identifier("a state")};
        while (accept(",")) states.push_back(identifier("a state"));
        expect(";");
        guarded(at, [&] { m.declare_states(states); });
        seen_states = true;
      } else if (at_word("init")) {
        if (seen_init) fail("more than one 'init' line", at);
        next();
        Distribution d = distribution();
        expect(";");
        guarded(at, [&] { m.set_initial(std::move(d)); });
        seen_init = true;
      } else if (at_word("trans")) {
        next();
        std::string from = identifier("a state");
        std::string action = identifier("an action");
        expect("->");
        Distribution d = distribution();
        expect(";");
        guarded(at, [&] { m.add_transition(from, action, std::move(d)); });
        seen_trans = true;
      } else {
        fail("expected 'states', 'init' or 'trans' but found " + describe(at));
      }
    }
    if (!seen_init) fail("missing 'init' line");
    return m;
  }

 private:
  template <class F>
  void guarded(const Token& at, F&& f) {
    try {
      f();
    } catch (const InvalidArgument& e) {
      fail(e.what(), at);
    } catch (const UnknownState& e) {
      fail(e.what(), at);
    }
  }

  Distribution distribution() {
    Distribution d;
    do {
      const Token& at = peek();
      std::string s = identifier("a state");
      expect(":");
      Rational p = number();
      if (!d.emplace(s, p).second) fail("state " + s + " listed twice", at);
    } while (accept(","));
    return d;
  }
};

class BesParser : public Parser {
 public:
  using Parser::Parser;

  BES file() {
    expect_word("bes");
    std::vector<BoolEquation> eqs;
    std::set<std::string> seen;
    while (!at_end()) {
      FixOp op = fixop();
      const Token& at = peek();
      std::string lhs = identifier("a variable");
      if (!seen.insert(lhs).second) fail("variable " + lhs + " is bound twice", at);
      expect("=");
      BoolExpr rhs = disjunction();
      expect(";");
      eqs.push_back(BoolEquation{op, lhs, rhs});
    }
    return BES(std::move(eqs));
  }

 private:
  BoolExpr disjunction() {
    BoolExpr left = conjunction();
    if (accept("||")) return BoolExpr::disj(left, disjunction());
    return left;
  }

  BoolExpr conjunction() {
    BoolExpr left = atom();
    if (accept("&&")) return BoolExpr::conj(left, conjunction());
    return left;
  }

  BoolExpr atom() {
    if (at_word("true") || at_word("false")) return BoolExpr::literal(next().text == "true");
    if (accept("(")) {
      BoolExpr e = disjunction();
      expect(")");
      return e;
    }
    return BoolExpr::variable(identifier("a variable"));
  }
};

inline void print_formula(std::string& out, const Formula& f, int required) {
  using K = Formula::Kind;
  auto level = [](K k) {
    switch (k) {
      case K::Or: return 0;
      case K::And: return 1;
      case K::Add: return 2;
      case K::Scale: return 3;
      case K::Diamond:
      case K::Box: return 4;
      case K::Mu:
      case K::Nu: return -1;
      default: return 5;
    }
  };
  int l = level(f.kind());
  // A binder extends as far right as possible, so it needs parentheses
  // everywhere except at the outermost position.
  bool parens = l < 0 ? required > 0 : l < required;
  if (parens) out += '(';
  switch (f.kind()) {
    case K::Var: out += f.name(); break;
    case K::Const: out += f.value().str(); break;
    case K::Scale:
      out += f.coeff().str() + " * ";
      print_formula(out, f.arg(0), 3);
      break;
    case K::Add:
      print_formula(out, f.arg(0), 3);
      out += " + ";
      print_formula(out, f.arg(1), 2);
      break;
    case K::And:
      print_formula(out, f.arg(0), 2);
      out += " /\\ ";
      print_formula(out, f.arg(1), 1);
      break;
    case K::Or:
      print_formula(out, f.arg(0), 1);
      out += " \\/ ";
      print_formula(out, f.arg(1), 0);
      break;
    case K::Diamond:
    case K::Box:
      out += f.kind() == K::Diamond ? "<" + f.name() + "> " : "[" + f.name() + "] ";
      print_formula(out, f.arg(0), 4);
      break;
    case K::Mu:
    case K::Nu:
      out += (f.kind() == K::Mu ? "mu " : "nu ") + f.name() + " . ";
      print_formula(out, f.arg(0), 0);
      break;
  }
  if (parens) out += ')';
}

}  // namespace detail

/// A single RES expression, negation kept as written.
inline Expr parse_expr(std::string_view text) {
  detail::ExprParser p(text, true);
  Expr e = p.expression();
  p.finish();
  return e;
}

/// A RES file. Negation is eliminated; an odd negation is a parse error.
inline RES parse_res(std::string_view text) {
  detail::ExprParser p(text, true);
  return p.system();
}

inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text, false).file(); }

inline PLTS parse_plts(std::string_view text) { return detail::PltsParser(text, false).file(); }

inline BES parse_bes(std::string_view text) { return detail::BesParser(text, true).file(); }

inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print_formula(out, f, 0);
  return out;
}

inline std::string print_res(const RES& e) { return to_string(e); }

inline std::string print_formula(const Formula& f) { return "form\n" + to_string(f) + "\n"; }

inline std::string print_plts(const PLTS& m) {
  auto dist = [](const Distribution& d) {
    std::string out;
    for (const auto& [s, p] : d) {
      if (!out.empty()) out += ", ";
      out += s + ":" + rational_to_string(p);
    }
    return out;
  };
  std::string out = "plts\nstates ";
  for (std::size_t i = 0; i < m.states().size(); ++i) out += (i ? ", " : "") + m.states()[i];
  out += ";\ninit " + dist(m.initial()) + ";\n";
  for (const auto& [s, a, d] : m.transitions()) out += "trans " + s + " " + a + " -> " + dist(d) + ";\n";
  return out;
}

inline std::string print_bes(const BES& b) { return to_string(b); }

}  // namespace realeq
