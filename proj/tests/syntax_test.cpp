#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "generators.hpp"

using namespace realeq;
using namespace realeq::testing;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(REALEQ_SAMPLES) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Formula random_formula(Rng& rng, std::vector<std::string>& scope, int depth, int& fresh) {
  if (depth <= 0 || chance(rng, 0.25)) {
    if (!scope.empty() && chance(rng, 0.6)) return Formula::var(scope[pick(rng, scope.size())]);
    return Formula::constant(random_constant(rng));
  }
  auto r = [&] { return random_formula(rng, scope, depth - 1, fresh); };
  switch (pick(rng, 9)) {
    case 0: return Formula::scale(random_coeff(rng), r());
    case 1: return Formula::add(r(), r());
    case 2: return Formula::join(r(), r());
    case 3: return Formula::meet(r(), r());
    case 4: return Formula::diamond(chance(rng, 0.5) ? "a" : "b", r());
    case 5: return Formula::box(chance(rng, 0.5) ? "a" : "b", r());
    default: {
      std::string x = "X" + std::to_string(fresh++);
      scope.push_back(x);
      Formula body = r();
      scope.pop_back();
      return chance(rng, 0.5) ? Formula::mu(x, body) : Formula::nu(x, body);
    }
  }
}

ParseError parse_error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError";
  return ParseError("none", 0, 0);
}

}  // namespace

TEST(ExprSyntaxTest, Precedence) {
  EXPECT_EQ(parse_expr("X \\/ Y /\\ Z"), max(var("X"), min(var("Y"), var("Z"))));
  EXPECT_EQ(parse_expr("X /\\ Y + 1"), min(var("X"), add(var("Y"), constant(ExtReal(1)))));
  EXPECT_EQ(parse_expr("2 * X + 1"), add(scale(PosRational(2), var("X")), constant(ExtReal(1))));
  EXPECT_EQ(parse_expr("1/2 * 3 * X"), scale(PosRational(1, 2), scale(PosRational(3), var("X"))));
  EXPECT_EQ(parse_expr("X + Y + Z"), add(var("X"), add(var("Y"), var("Z"))));
}

TEST(ExprSyntaxTest, LiteralsAndMinus) {
  EXPECT_EQ(parse_expr("-inf"), neg_inf_expr());
  EXPECT_EQ(parse_expr("inf"), pos_inf_expr());
  EXPECT_EQ(parse_expr("-5/10"), constant(ExtReal(-1, 2)));
  EXPECT_EQ(parse_expr("X - 10"), add(var("X"), constant(ExtReal(-10))));
  EXPECT_EQ(parse_expr("X - Y"), add(var("X"), neg(var("Y"))));
  EXPECT_EQ(parse_expr("-(X)"), neg(var("X")));
}

TEST(ExprSyntaxTest, Calls) {
  EXPECT_EQ(parse_expr("cond(X, Y, 1)"), cond(var("X"), var("Y"), constant(ExtReal(1))));
  EXPECT_EQ(parse_expr("conda(X, Y, 1)"), conda(var("X"), var("Y"), constant(ExtReal(1))));
  EXPECT_EQ(parse_expr("eqinf(X) + eqninf(Y)"), add(eq_inf(var("X")), eq_neg_inf(var("Y"))));
}

TEST(ExprSyntaxTest, PrintParseRoundTrip) {
  Rng rng(61);
  const std::vector<std::string> vars = {"X", "Y", "Z.s1"};
  for (int i = 0; i < 500; ++i) {
    ExprShape shape;
    shape.depth = 5;
    shape.conditionals = i % 2 == 0;
    Expr e = random_expr(rng, vars, shape);
    EXPECT_EQ(parse_expr(to_string(e)), e) << to_string(e);
  }
  for (int i = 0; i < 200; ++i) {
    Expr e = random_even_negation_expr(rng, vars, 4, false);
    EXPECT_EQ(parse_expr(to_string(e)), e) << to_string(e);
  }
}

TEST(ExprSyntaxTest, Errors) {
  EXPECT_THROW(parse_expr("X +"), ParseError);
  EXPECT_THROW(parse_expr("(X"), ParseError);
  EXPECT_THROW(parse_expr("cond(X, Y)"), ParseError);
  EXPECT_THROW(parse_expr("0 * X"), ParseError);
  EXPECT_THROW(parse_expr("1/0"), ParseError);
  EXPECT_THROW(parse_expr("X Y"), ParseError);
  EXPECT_THROW(parse_expr("mu"), ParseError);
}

TEST(RESSyntaxTest, IntroductionFile) {
  RES e = parse_res(slurp("intro.res"));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].op, FixOp::Mu);
  EXPECT_EQ(e[1].op, FixOp::Nu);
  EXPECT_EQ(to_string(e[1].rhs), "(1/10 * Y + -10 \\/ 2 * X + 5) /\\ 17");
  EXPECT_EQ(parse_res(print_res(e)), e);
}

TEST(RESSyntaxTest, NegationIsEliminated) {
  RES e = parse_res("res mu X = -(-(X) /\\ -3);");
  EXPECT_EQ(e[0].rhs, max(var("X"), constant(ExtReal(3))));
}

TEST(RESSyntaxTest, ErrorPositions) {
  ParseError odd = parse_error_of([] { parse_res("res\nmu X = 1;\nnu Y = -(X);"); });
  EXPECT_EQ(odd.line(), 3);
  EXPECT_EQ(odd.column(), 8);
  ParseError twice = parse_error_of([] { parse_res("res\nmu X = 1;\n  nu X = 2;"); });
  EXPECT_EQ(twice.line(), 3);
  EXPECT_EQ(twice.column(), 6);
  ParseError missing = parse_error_of([] { parse_res("res mu X = 1"); });
  EXPECT_EQ(missing.line(), 1);
  EXPECT_NE(std::string(missing.what()).find("';'"), std::string::npos);
  EXPECT_THROW(parse_res("mu X = 1;"), ParseError);
  EXPECT_THROW(parse_res("res mu cond = 1;"), ParseError);
}

TEST(RESSyntaxTest, CommentsAreIgnored) {
  RES e = parse_res("# header\nres # systems\nmu X = 1; # done\n");
  ASSERT_EQ(e.size(), 1u);
}

TEST(FormulaSyntaxTest, Samples) {
  for (const char* name : {"longest_a.form", "bloop.form", "reward.form"}) {
    Formula f = parse_formula(slurp(name));
    EXPECT_EQ(parse_formula(print_formula(f)), f) << name;
  }
  Formula reward = parse_formula(slurp("reward.form"));
  EXPECT_EQ(reward.kind(), Formula::Kind::Mu);
  EXPECT_EQ(reward.name(), "R");
}

TEST(FormulaSyntaxTest, BinderExtendsRight) {
  Formula f = parse_formula("form mu X . X \\/ 1");
  ASSERT_EQ(f.kind(), Formula::Kind::Mu);
  EXPECT_EQ(f.arg(0).kind(), Formula::Kind::Or);
  Formula g = parse_formula("form 0 /\\ nu Y . <b> Y");
  ASSERT_EQ(g.kind(), Formula::Kind::And);
  EXPECT_EQ(g.arg(1).kind(), Formula::Kind::Nu);
}

TEST(FormulaSyntaxTest, ModalitiesBindTightly) {
  Formula f = parse_formula("form <a> X + 1");
  ASSERT_EQ(f.kind(), Formula::Kind::Add);
  EXPECT_EQ(f.arg(0).kind(), Formula::Kind::Diamond);
  Formula g = parse_formula("form [b] (X - 1)");
  ASSERT_EQ(g.kind(), Formula::Kind::Box);
  EXPECT_EQ(g.arg(0), Formula::add(Formula::var("X"), Formula::constant(ExtReal(-1))));
}

TEST(FormulaSyntaxTest, RoundTrip) {
  Rng rng(62);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> scope;
    int fresh = 0;
    Formula f = random_formula(rng, scope, 5, fresh);
    EXPECT_EQ(parse_formula(print_formula(f)), f) << to_string(f);
  }
}

TEST(FormulaSyntaxTest, Errors) {
  EXPECT_THROW(parse_formula("form X - Y"), ParseError);
  EXPECT_THROW(parse_formula("form <a X"), ParseError);
  EXPECT_THROW(parse_formula("form mu . X"), ParseError);
  EXPECT_THROW(parse_formula("form mu X . X extra"), ParseError);
}

TEST(PltsSyntaxTest, SamplesRoundTrip) {
  for (const char* name : {"longest_a.plts", "bloop.plts", "reward.plts"}) {
    PLTS m = parse_plts(slurp(name));
    EXPECT_EQ(parse_plts(print_plts(m)), m) << name;
  }
  PLTS bloop = parse_plts(slurp("bloop.plts"));
  EXPECT_EQ(bloop.successors("s1", "a").size(), 2u);
  EXPECT_EQ(bloop.initial().at("s1"), Rational(1));
}

TEST(PltsSyntaxTest, Errors) {
  EXPECT_THROW(parse_plts("plts trans s a -> s:1;"), ParseError);  // no init
  EXPECT_THROW(parse_plts("plts init s:1; init s:1;"), ParseError);
  EXPECT_THROW(parse_plts("plts init s:1/2;"), ParseError);
  EXPECT_THROW(parse_plts("plts init s:1/2, s:1/2;"), ParseError);
  EXPECT_THROW(parse_plts("plts init s:1; states s;"), ParseError);
  EXPECT_THROW(parse_plts("plts states s; init t:1;"), ParseError);
  ParseError e = parse_error_of([] { parse_plts("plts\ninit s:1;\ntrans s a -> t:1/3;"); });
  EXPECT_EQ(e.line(), 3);
}

TEST(BesSyntaxTest, AlternatingSample) {
  BES b = parse_bes(slurp("alternating.bes"));
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].rhs, BoolExpr::disj(BoolExpr::variable("X"), BoolExpr::variable("Y")));
  EXPECT_EQ(b[1].op, FixOp::Nu);
  EXPECT_EQ(parse_bes(print_bes(b)), b);
}

TEST(BesSyntaxTest, RoundTrip) {
  Rng rng(63);
  for (int i = 0; i < 200; ++i) {
    BES b = random_closed_bes(rng, 5);
    EXPECT_EQ(parse_bes(print_bes(b)), b) << print_bes(b);
  }
}

TEST(BesSyntaxTest, Errors) {
  EXPECT_THROW(parse_bes("bes mu X = X ||;"), ParseError);
  EXPECT_THROW(parse_bes("bes mu X = X; nu X = X;"), ParseError);
  EXPECT_THROW(parse_bes("bes mu X = 1;"), ParseError);
}
