#include <gtest/gtest.h>

#include "generators.hpp"

using namespace realeq;
using namespace realeq::testing;

namespace {

BoolExpr V(const char* name) { return BoolExpr::variable(name); }

// Brute force over all assignments, nesting fixpoints from the first equation inwards.
bool brute(const BES& b, std::size_t i, std::map<std::string, bool>& env, const std::string& target);

bool eval(const BoolExpr& e, const std::map<std::string, bool>& env) {
  switch (e.kind()) {
    case BoolExpr::Kind::Var: return env.at(e.name());
    case BoolExpr::Kind::True: return true;
    case BoolExpr::Kind::False: return false;
    case BoolExpr::Kind::Or: return eval(e.lhs(), env) || eval(e.rhs(), env);
    case BoolExpr::Kind::And: return eval(e.lhs(), env) && eval(e.rhs(), env);
  }
  return false;
}

// Value of equation i's variable given values for equations < i, by Kleene iteration
// on the two-element lattice.
bool solve_from(const BES& b, std::size_t i, std::map<std::string, bool> env) {
  bool x = b[i].op == FixOp::Nu;
  for (int round = 0; round < 3; ++round) {
    env[b[i].lhs] = x;
    for (std::size_t j = i + 1; j < b.size(); ++j) env[b[j].lhs] = solve_from(b, j, env);
    bool next = eval(b[i].rhs, env);
    if (next == x) break;
    x = next;
  }
  return x;
}

std::map<std::string, bool> nested_iteration(const BES& b) {
  std::map<std::string, bool> env, out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    env[b[i].lhs] = solve_from(b, i, env);
    out[b[i].lhs] = env[b[i].lhs];
  }
  return out;
}

}  // namespace

TEST(BESTest, AlternatingExample) {
  BES b({{FixOp::Mu, "X", BoolExpr::disj(V("X"), V("Y"))}, {FixOp::Nu, "Y", BoolExpr::conj(V("X"), V("Y"))}});
  auto direct = solve_bes_direct(b);
  EXPECT_FALSE(direct.at("X"));
  EXPECT_FALSE(direct.at("Y"));
  SolvedRES lit = gauss_solve(embed_literal(b));
  EXPECT_EQ(lit.at("X"), ExtReal::neg_inf());
  EXPECT_EQ(lit.at("Y"), ExtReal::neg_inf());
  SolvedRES con = gauss_solve(embed_const(b, ExtReal(1), ExtReal(0)));
  EXPECT_EQ(con.at("X"), ExtReal(0));
  EXPECT_EQ(con.at("Y"), ExtReal(0));
}

TEST(BESTest, SingleEquations) {
  EXPECT_FALSE(solve_bes_direct(BES({{FixOp::Mu, "X", V("X")}})).at("X"));
  EXPECT_TRUE(solve_bes_direct(BES({{FixOp::Nu, "X", V("X")}})).at("X"));
  EXPECT_TRUE(solve_bes_direct(BES({{FixOp::Mu, "X", BoolExpr::disj(V("X"), BoolExpr::literal(true))}})).at("X"));
  EXPECT_FALSE(solve_bes_direct(BES({{FixOp::Nu, "X", BoolExpr::conj(V("X"), BoolExpr::literal(false))}})).at("X"));
}

TEST(BESTest, OrderMatters) {
  BES nu_first({{FixOp::Nu, "Y", V("X")}, {FixOp::Mu, "X", V("Y")}});
  BES mu_first({{FixOp::Mu, "X", V("Y")}, {FixOp::Nu, "Y", V("X")}});
  EXPECT_TRUE(solve_bes_direct(nu_first).at("X"));
  EXPECT_FALSE(solve_bes_direct(mu_first).at("X"));
}

TEST(BESTest, OpenSystemIsRejected) {
  EXPECT_THROW(solve_bes_direct(BES({{FixOp::Mu, "X", V("Z")}})), NotClosed);
}

TEST(BESTest, DuplicateLhsIsRejected) {
  EXPECT_THROW(BES({{FixOp::Mu, "X", V("X")}, {FixOp::Nu, "X", V("X")}}), InvalidArgument);
}

TEST(BESTest, BadConstants) {
  BES b({{FixOp::Mu, "X", V("X")}});
  EXPECT_THROW(embed_const(b, ExtReal(0), ExtReal(1)), BadConstants);
  EXPECT_THROW(embed_const(b, ExtReal(2), ExtReal(2)), BadConstants);
  EXPECT_NO_THROW(embed_const(b, ExtReal::pos_inf(), ExtReal::neg_inf()));
}

TEST(BESTest, ConstEmbeddingShape) {
  BES b({{FixOp::Nu, "X", BoolExpr::conj(V("X"), BoolExpr::literal(true))}});
  RES e = embed_const(b, ExtReal(5), ExtReal(-1));
  EXPECT_EQ(to_string(e[0].rhs), "-1 \\/ 5 /\\ X /\\ inf");
  EXPECT_EQ(gauss_solve(e).at("X"), ExtReal(5));
}

TEST(BESTest, DirectSolverMatchesNestedIteration) {
  Rng rng(51);
  for (int i = 0; i < 300; ++i) {
    BES b = random_closed_bes(rng, 5);
    EXPECT_EQ(solve_bes_direct(b), nested_iteration(b)) << to_string(b);
  }
}

TEST(BESTest, EmbeddingsMatchTheDirectSolution) {
  Rng rng(52);
  const std::vector<std::pair<ExtReal, ExtReal>> constants = {{ExtReal(1), ExtReal(0)},
                                                              {ExtReal(7, 2), ExtReal(-2)},
                                                              {ExtReal::pos_inf(), ExtReal(3)},
                                                              {ExtReal(-1), ExtReal::neg_inf()}};
  for (int i = 0; i < 200; ++i) {
    BES b = random_closed_bes(rng, 6);
    auto direct = solve_bes_direct(b);
    SolvedRES lit = gauss_solve(embed_literal(b));
    const auto& [ct, cf] = constants[i % constants.size()];
    SolvedRES con = gauss_solve(embed_const(b, ct, cf));
    for (const auto& [v, truth] : direct) {
      EXPECT_EQ(lit.at(v), truth ? ExtReal::pos_inf() : ExtReal::neg_inf()) << v << " in\n" << to_string(b);
      EXPECT_EQ(con.at(v), truth ? ct : cf) << v << " in\n" << to_string(b);
    }
  }
}

TEST(BESTest, Printing) {
  BES b({{FixOp::Mu, "X", BoolExpr::conj(BoolExpr::disj(V("X"), V("Y")), V("Y"))},
         {FixOp::Nu, "Y", BoolExpr::disj(V("X"), BoolExpr::conj(V("Y"), BoolExpr::literal(true)))}});
  EXPECT_EQ(to_string(b), "bes\nmu X = (X || Y) && Y;\nnu Y = X || Y && true;\n");
  EXPECT_EQ(b.free_variables(), std::set<std::string>{});
}
