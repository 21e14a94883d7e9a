#include <gtest/gtest.h>

#include "generators.hpp"

using namespace realeq;
using namespace realeq::testing;

namespace {

const char* kIntro =
    "res\n"
    "mu X = 1/2 * X + 1 \\/ 1/5 * Y + 3;\n"
    "nu Y = (1/10 * Y - 10 \\/ 2 * X + 5) /\\ 17;\n";

const char* kGauss =
    "res\n"
    "mu X = Y;\n"
    "nu Y = (X + 1) /\\ Y;\n";

}  // namespace

TEST(RESTest, RejectsDuplicateBinders) {
  std::vector<Equation> eqs = {{FixOp::Mu, "X", var("X")}, {FixOp::Nu, "X", constant(ExtReal(1))}};
  EXPECT_THROW(RES{eqs}, InvalidArgument);
}

TEST(RESTest, BoundAndFreeVariables) {
  RES e = parse_res("res mu X = Y + Z; nu Y = X;");
  EXPECT_EQ(bnd(e), (std::set<std::string>{"X", "Y"}));
  EXPECT_EQ(free_variables(e), (std::set<std::string>{"Z"}));
  EXPECT_FALSE(is_closed(e));
  EXPECT_EQ(e.index_of("Y"), 1u);
  EXPECT_FALSE(e.index_of("Z").has_value());
}

TEST(RESTest, SubstitutionRespectsOrder) {
  RES e = parse_res(kGauss);
  RES s = substitute_later_into_earlier(e, 0, 1);
  EXPECT_EQ(s[0].rhs, e[1].rhs);
  EXPECT_EQ(s[1], e[1]);
  EXPECT_THROW(substitute_later_into_earlier(e, 1, 0), IndexOrder);
  EXPECT_THROW(substitute_later_into_earlier(e, 1, 1), IndexOrder);
  EXPECT_THROW(substitute_later_into_earlier(e, 0, 2), IndexOrder);
}

TEST(GaussTest, IntroductionSystem) {
  SolvedRES s = gauss_solve(parse_res(kIntro));
  EXPECT_EQ(s.at("X"), ExtReal(32, 5));
  EXPECT_EQ(s.at("Y"), ExtReal(17));
}

TEST(GaussTest, AlternationExample) {
  SolvedRES s = gauss_solve(parse_res(kGauss));
  EXPECT_EQ(s.at("X"), ExtReal::neg_inf());
  EXPECT_EQ(s.at("Y"), ExtReal::neg_inf());
}

TEST(GaussTest, DivergentEquation) {
  EXPECT_EQ(gauss_solve(parse_res("res mu X = (X + 1) \\/ 0;")).at("X"), ExtReal::pos_inf());
  EXPECT_EQ(gauss_solve(parse_res("res nu X = (X + -1) /\\ 0;")).at("X"), ExtReal::neg_inf());
}

TEST(GaussTest, OrderOfEquationsMatters) {
  // nu Y = X, mu X = Y  gives inf; mu X = Y, nu Y = X  gives -inf
  SolvedRES outer_nu = gauss_solve(parse_res("res nu Y = X; mu X = Y;"));
  SolvedRES outer_mu = gauss_solve(parse_res("res mu X = Y; nu Y = X;"));
  EXPECT_EQ(outer_nu.at("X"), ExtReal::pos_inf());
  EXPECT_EQ(outer_mu.at("X"), ExtReal::neg_inf());
}

TEST(GaussTest, OpenSystemIsRejected) { EXPECT_THROW(gauss_solve(parse_res("res mu X = Y;")), NotClosed); }

TEST(GaussTest, BackwardEliminationWorksOnOpenSystems) {
  RES e = backward_eliminate(parse_res("res mu X = Y \\/ Z; nu Y = (X + 1) /\\ Y;"));
  EXPECT_EQ(occ(e[0].rhs), (std::set<std::string>{"Z"}));
  EXPECT_FALSE(occurs("Y", e[1].rhs));
  // nu Y = (X + 1) /\ Y gives Y = X + 1, and mu X = (X + 1) \/ Z diverges unless Z = -inf
  for (const ExtReal& z : sample_values()) {
    Valuation eta{{"Z", z}};
    EXPECT_EQ(evaluate(e[0].rhs, eta), z.is_neg_inf() ? z : ExtReal::pos_inf());
  }
}

TEST(TraceTest, AlternationExampleHasFiveSteps) {
  std::vector<TraceStep> steps = trace(parse_res(kGauss));
  ASSERT_EQ(steps.size(), 5u);
  const std::vector<std::string> rules = {"solve", "E3", "solve", "E4", "E3"};
  for (std::size_t i = 0; i < steps.size(); ++i) EXPECT_EQ(steps[i].rule, rules[i]) << "step " << i + 1;
  EXPECT_EQ(steps[2].after[0].rhs, neg_inf_expr());
  EXPECT_EQ(steps[3].after[0].lhs, "Y");
  EXPECT_EQ(steps[3].after[1].lhs, "X");
  EXPECT_EQ(steps[4].after[0].rhs, neg_inf_expr());
  EXPECT_EQ(steps[0].before, parse_res(kGauss));
}

TEST(TraceTest, UnchangedSubstitutionIsNotRecorded) {
  std::vector<TraceStep> steps = trace(parse_res("res mu X = 1; mu Y = 2;"));
  for (const TraceStep& s : steps) EXPECT_NE(s.rule, "E3");
  EXPECT_EQ(steps.size(), 3u);  // two solves and one move
}

TEST(TraceTest, StepsChain) {
  std::vector<TraceStep> steps = trace(parse_res(kIntro));
  for (std::size_t i = 1; i < steps.size(); ++i) EXPECT_EQ(steps[i].before, steps[i - 1].after);
}

TEST(GaussTest, RandomSystemsSatisfyTheirEquations) {
  Rng rng(31);
  for (int i = 0; i < 150; ++i) {
    RES e = random_closed_res(rng, 4, i % 2 == 0);
    SolvedRES s = gauss_solve(e);
    ASSERT_EQ(s.size(), e.size());
    ResidualReport r = residual_check(e, s);
    EXPECT_TRUE(r.ok()) << to_string(e);
  }
}

TEST(GaussTest, SingleEquationSystemsMatchTheOracle) {
  Rng rng(32);
  for (int i = 0; i < 100; ++i) {
    FixOp op = i % 2 ? FixOp::Mu : FixOp::Nu;
    Expr rhs = random_single_rhs(rng, op, "X", {});
    SolvedRES s = gauss_solve(RES({Equation{op, "X", rhs}}));
    EXPECT_EQ(s.at("X"), univariate_fixed_point(op, "X", rhs, Valuation{})) << to_string(rhs);
  }
}

TEST(GaussTest, PrintedSystemParsesBack) {
  Rng rng(33);
  for (int i = 0; i < 100; ++i) {
    RES e = random_closed_res(rng, 4, true);
    EXPECT_EQ(parse_res(to_string(e)), e);
  }
}
