#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "realeq/realeq.hpp"

using namespace realeq;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(REALEQ_SAMPLES) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PLTS model(const char* text) { return parse_plts(text); }

}  // namespace

TEST(ModalTest, LongestSequenceOfA) {
  Formula phi = parse_formula(slurp("longest_a.form"));
  PLTS m = parse_plts(slurp("longest_a.plts"));
  RES e = translate(phi, m);
  ASSERT_EQ(e.size(), 13u);
  EXPECT_EQ(e[0].lhs, "X_init");
  EXPECT_EQ(e[0].rhs, var("X.s1"));
  SolvedRES s = gauss_solve(e);
  EXPECT_EQ(s.at("X_init"), ExtReal(2));
  const ExtReal ninf = ExtReal::neg_inf();
  const std::map<std::string, ExtReal> expected = {
      {"X.s1", ExtReal(2)}, {"X.s2", ExtReal(1)}, {"X.s3", ExtReal(0)}, {"X.s4", ninf},
      {"X.s5", ninf},       {"X.s6", ninf},       {"Y.s1", ninf},       {"Y.s2", ninf},
      {"Y.s3", ExtReal::pos_inf()},               {"Y.s4", ninf},       {"Y.s5", ninf},
      {"Y.s6", ninf}};
  for (const auto& [v, x] : expected) EXPECT_EQ(s.at(v), x) << v;
}

TEST(ModalTest, ProbabilityToReachABLoop) {
  Formula phi = parse_formula(slurp("bloop.form"));
  PLTS m = parse_plts(slurp("bloop.plts"));
  EXPECT_EQ(evaluate_formula(phi, m), ExtReal(1, 2));
}

TEST(ModalTest, StableReward) {
  Formula phi = parse_formula(slurp("reward.form"));
  PLTS m = parse_plts(slurp("reward.plts"));
  SolvedRES s = gauss_solve(translate(phi, m));
  EXPECT_EQ(s.at("R.s1"), ExtReal(10));
  EXPECT_EQ(s.at("R.s2"), ExtReal(11));
  EXPECT_EQ(s.at("X_init"), ExtReal(10));
}

TEST(ModalTest, EmptyModalities) {
  PLTS m = model("plts init s:1; trans s a -> s:1;");
  EXPECT_EQ(evaluate_formula(Formula::diamond("b", Formula::constant(ExtReal(3))), m), ExtReal::neg_inf());
  EXPECT_EQ(evaluate_formula(Formula::box("b", Formula::constant(ExtReal(3))), m), ExtReal::pos_inf());
  EXPECT_EQ(evaluate_formula(Formula::box("a", Formula::constant(ExtReal(3))), m), ExtReal(3));
}

TEST(ModalTest, WeightsFollowTheDistribution) {
  PLTS m = model("plts states t, u; init t:1; trans t a -> t:1/4, u:3/4;");
  RES e = translate(Formula::mu("X", Formula::diamond("a", Formula::var("X"))), m);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[1].lhs, "X.t");
  EXPECT_EQ(e[1].rhs, add(scale(PosRational(1, 4), var("X.t")), scale(PosRational(3, 4), var("X.u"))));
  EXPECT_EQ(e[2].rhs, neg_inf_expr());
}

TEST(ModalTest, InitialDistributionWeighsTheFormula) {
  PLTS m = model("plts init s:1/2, t:1/2; trans s a -> s:1; trans t a -> t:1;");
  Formula phi = Formula::meet(Formula::constant(ExtReal(4)), Formula::box("a", Formula::constant(ExtReal(2))));
  EXPECT_EQ(evaluate_formula(phi, m), ExtReal(2));
  RES e = translate(Formula::constant(ExtReal(6)), m);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(evaluate(e[0].rhs, Valuation{}), ExtReal(6));
}

TEST(ModalTest, DuplicateDistributionsCollapse) {
  PLTS m;
  m.add_transition("s", "a", {{"s", Rational(1)}});
  m.add_transition("s", "a", {{"s", Rational(1)}});
  EXPECT_EQ(m.successors("s", "a").size(), 1u);
  EXPECT_EQ(m.transitions().size(), 1u);
}

TEST(ModalTest, InvalidDistributions) {
  PLTS m;
  EXPECT_THROW(m.add_transition("s", "a", {}), InvalidArgument);
  EXPECT_THROW(m.add_transition("s", "a", {{"s", Rational(1, 2)}}), InvalidArgument);
  EXPECT_THROW(m.add_transition("s", "a", {{"s", Rational(3, 2)}, {"t", Rational(-1, 2)}}), InvalidArgument);
  EXPECT_THROW(m.initial(), InvalidArgument);
}

TEST(ModalTest, DeclaredStatesAreClosed) {
  PLTS m;
  m.declare_states({"p", "q"});
  EXPECT_NO_THROW(m.add_transition("p", "a", {{"q", Rational(1)}}));
  EXPECT_THROW(m.add_transition("p", "a", {{"r", Rational(1)}}), UnknownState);
  EXPECT_THROW(m.declare_states({"p"}), InvalidArgument);
}

TEST(ModalTest, StatesInFirstAppearanceOrder) {
  PLTS m = model("plts init c:1; trans c a -> b:1; trans b a -> a:1;");
  EXPECT_EQ(m.states(), (std::vector<std::string>{"c", "b", "a"}));
}

TEST(ModalTest, Diagnostics) {
  PLTS m = model("plts init s:1; trans s a -> s:1;");
  auto unbound = check_formula(Formula::mu("X", Formula::var("Y")));
  ASSERT_EQ(unbound.size(), 1u);
  EXPECT_EQ(unbound[0].code, Diagnostic::Code::UnboundVariable);

  Formula twice = Formula::mu("X", Formula::join(Formula::var("X"), Formula::nu("X", Formula::var("X"))));
  auto dup = check_formula(twice);
  ASSERT_EQ(dup.size(), 1u);
  EXPECT_EQ(dup[0].code, Diagnostic::Code::DuplicateBinder);

  auto unknown = check_formula(Formula::diamond("z", Formula::constant(ExtReal(1))), &m);
  ASSERT_EQ(unknown.size(), 1u);
  EXPECT_EQ(unknown[0].severity, Diagnostic::Severity::Warning);
  EXPECT_EQ(unknown[0].code, Diagnostic::Code::UnknownAction);
}

TEST(ModalTest, TranslateRejectsBadFormulas) {
  PLTS m = model("plts init s:1;");
  EXPECT_THROW(translate(Formula::var("X"), m), UnboundVariable);
  EXPECT_THROW(translate(Formula::mu("X", Formula::nu("X", Formula::var("X"))), m), DuplicateBinder);
  EXPECT_NO_THROW(translate(Formula::diamond("z", Formula::constant(ExtReal(1))), m));
}

TEST(ModalTest, NestedFixpointsAlternate) {
  // nu Y . <a> Y on a self-loop is inf; the outer mu picks it up
  PLTS m = model("plts init s:1; trans s a -> s:1;");
  Formula phi = Formula::mu("X", Formula::meet(Formula::constant(ExtReal(7)), Formula::nu("Y", Formula::diamond("a", Formula::var("Y")))));
  EXPECT_EQ(evaluate_formula(phi, m), ExtReal(7));
  Formula step = Formula::diamond("a", Formula::add(Formula::var("X"), Formula::constant(ExtReal(-1))));
  EXPECT_EQ(evaluate_formula(Formula::nu("X", step), m), ExtReal::pos_inf());
  EXPECT_EQ(evaluate_formula(Formula::mu("X", step), m), ExtReal::neg_inf());
}
