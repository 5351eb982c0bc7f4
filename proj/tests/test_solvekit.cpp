#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "paperplan/solvekit.hpp"
#include "support/lp_oracles.hpp"

using namespace paperplan::solvekit;

TEST(SolveLp, SingleVariableLowerBoundRow) {
  LinearProgram lp;
  const int x = lp.add_variable(1.0);
  lp.add_row({{x, -1.0}}, Relation::kLessEqual, -3.0);
  const auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.primal[x], 3.0, 1e-9);
  EXPECT_NEAR(sol.objective, 3.0, 1e-9);
}

TEST(SolveLp, SimplexCornerDual) {
  LinearProgram lp;
  const int x = lp.add_variable(-1.0);
  const int y = lp.add_variable(-1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::kLessEqual, 1.0);
  const auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  // Vertices (0,0), (1,0), (0,1) have objectives 0, -1, -1.
  EXPECT_NEAR(sol.objective, -1.0, 1e-9);
  EXPECT_NEAR(sol.duals[0], -1.0, 1e-9);
}

TEST(SolveLp, ContradictoryBoundsInfeasible) {
  LinearProgram lp;
  const int x = lp.add_variable(0.0);
  lp.add_row({{x, -1.0}}, Relation::kLessEqual, -1.0);
  lp.add_row({{x, 1.0}}, Relation::kLessEqual, 0.0);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kInfeasible);
}

TEST(SolveLp, Unbounded) {
  LinearProgram lp;
  const int x = lp.add_variable(-1.0);
  const int y = lp.add_variable(0.0);
  lp.add_row({{x, 1.0}, {y, -1.0}}, Relation::kLessEqual, 2.0);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kUnbounded);
}

TEST(SolveLp, EqualityRowsAndUpperBounds) {
  LinearProgram lp;
  const int x = lp.add_variable(2.0, 0.0, 4.0);
  const int y = lp.add_variable(1.0, 1.0, 3.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::kEqual, 5.0);
  const auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.primal[x], 2.0, 1e-9);
  EXPECT_NEAR(sol.primal[y], 3.0, 1e-9);
  EXPECT_NEAR(sol.objective, 7.0, 1e-9);
}

TEST(SolveLp, MalformedRejected) {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.add_row({{3, 1.0}}, Relation::kLessEqual, 1.0);
  EXPECT_THROW(solve_lp(lp), std::invalid_argument);
}

TEST(SolveLp, WarmStartMatchesColdAfterAddingColumn) {
  LinearProgram lp;
  const int a = lp.add_variable(3.0);
  lp.add_row({{a, 2.0}}, Relation::kEqual, 10.0);
  const auto first = solve_lp(lp);
  ASSERT_EQ(first.status, LpStatus::kOptimal);
  const int b = lp.add_variable(1.0);
  lp.rows[0].terms.push_back({b, 1.0});
  Basis warm = first.basis;
  warm.status.insert(warm.status.begin() + b, VarStatus::kAtLower);
  const auto hot = solve_lp(lp, {}, &warm);
  const auto cold = solve_lp(lp);
  ASSERT_EQ(hot.status, LpStatus::kOptimal);
  EXPECT_NEAR(hot.objective, 10.0, 1e-9);
  EXPECT_NEAR(hot.objective, cold.objective, 1e-12);
}

TEST(SolveLp, RandomAgainstVertexEnumeration) {
  std::mt19937_64 rng(20240611);
  int feasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LinearProgram lp = oracle::random_lp(rng);
    const auto expected = oracle::lp_vertex_optimum(lp);
    const auto sol = solve_lp(lp);
    if (!expected) {
      EXPECT_EQ(sol.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(sol.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(sol.objective, *expected, 1e-6) << "trial " << trial;
    // Strong duality and dual sign conventions.
    EXPECT_NEAR(oracle::dual_objective(lp, sol.duals), sol.objective, 1e-6) << "trial " << trial;
    for (int i = 0; i < lp.num_rows(); ++i) {
      if (lp.rows[i].relation == Relation::kLessEqual) {
        EXPECT_LE(sol.duals[i], 1e-7);
      }
      const double act = row_activity(lp.rows[i], sol.primal);
      if (lp.rows[i].relation == Relation::kLessEqual) {
        EXPECT_LE(act, lp.rows[i].rhs + 1e-7);
        EXPECT_NEAR(sol.duals[i] * (lp.rows[i].rhs - act), 0.0, 1e-6);
      } else {
        EXPECT_NEAR(act, lp.rows[i].rhs, 1e-7);
      }
    }
  }
  EXPECT_GT(feasible, 40);
}

TEST(SolveLp, Deterministic) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const LinearProgram lp = oracle::random_lp(rng);
    const auto a = solve_lp(lp);
    const auto b = solve_lp(lp);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.primal, b.primal);
    EXPECT_EQ(a.duals, b.duals);
  }
}

TEST(SolveLp, WritesLpFormat) {
  LinearProgram lp;
  const int x = lp.add_variable(1.0, 0.0, 4.0, true, "x");
  lp.add_row({{x, 2.0}}, Relation::kLessEqual, 3.0, "cap");
  std::ostringstream out;
  write_lp_format(lp, out);
  const std::string text = out.str();
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("cap: 2 x <= 3"), std::string::npos);
  EXPECT_NE(text.find("General\n x"), std::string::npos);
}

TEST(SolveMip, SmallKnapsack) {
  // maximize 5a + 7b  <=>  minimize -5a - 7b
  LinearProgram lp;
  const int a = lp.add_variable(-5.0, 0.0, kInfinity, true);
  const int b = lp.add_variable(-7.0, 0.0, kInfinity, true);
  lp.add_row({{a, 3.0}, {b, 4.0}}, Relation::kLessEqual, 10.0);
  const auto r = solve_mip(lp, 10.0);
  ASSERT_EQ(r.status, MipStatus::kOptimal);
  EXPECT_EQ(r.values[a], 2.0);
  EXPECT_EQ(r.values[b], 1.0);
  EXPECT_NEAR(-r.objective, 17.0, 1e-9);
}

TEST(SolveMip, IntegralRelaxationReturnedUnchanged) {
  LinearProgram lp;
  const int a = lp.add_variable(1.0, 0.0, kInfinity, true);
  const int b = lp.add_variable(2.0, 0.0, kInfinity, true);
  lp.add_row({{a, -1.0}}, Relation::kLessEqual, -2.0);
  lp.add_row({{b, -1.0}}, Relation::kLessEqual, -3.0);
  const auto r = solve_mip(lp, 10.0);
  ASSERT_EQ(r.status, MipStatus::kOptimal);
  EXPECT_EQ(r.nodes, 1);
  EXPECT_EQ(r.values[a], 2.0);
  EXPECT_EQ(r.values[b], 3.0);
}

TEST(SolveMip, IntegerInfeasible) {
  LinearProgram lp;
  const int x = lp.add_variable(0.0, 0.0, kInfinity, true);
  lp.add_row({{x, -1.0}}, Relation::kLessEqual, -0.4);
  lp.add_row({{x, 1.0}}, Relation::kLessEqual, 0.6);
  EXPECT_EQ(solve_mip(lp, 10.0).status, MipStatus::kInfeasible);
}

TEST(SolveMip, NodeLimitTruncatesWithLabel) {
  LinearProgram lp;
  std::vector<Term> terms;
  for (int j = 0; j < 12; ++j) {
    const int v = lp.add_variable(-(10.0 + j), 0.0, 1.0, true);
    terms.push_back({v, 7.0 + 2 * j});
  }
  lp.add_row(terms, Relation::kLessEqual, 61.5);
  MipOptions opts;
  opts.node_limit = 3;
  const auto r = solve_mip(lp, opts);
  EXPECT_TRUE(r.truncated);
  EXPECT_TRUE(r.status == MipStatus::kFeasibleIncumbent || r.status == MipStatus::kTimeoutNoIncumbent);
  if (r.has_incumbent()) {
    EXPECT_LE(r.bound, r.objective + 1e-9);
    EXPECT_LE(row_activity(lp.rows[0], r.values), 61.5);
  }
}

TEST(SolveMip, MixedIntegerPolishesContinuousPart) {
  // y integer, x continuous: min x + 3y  s.t. x + 2y >= 3.5, x <= 1
  LinearProgram lp;
  const int x = lp.add_variable(1.0, 0.0, 1.0);
  const int y = lp.add_variable(3.0, 0.0, kInfinity, true);
  lp.add_row({{x, -1.0}, {y, -2.0}}, Relation::kLessEqual, -3.5);
  const auto r = solve_mip(lp, 10.0);
  ASSERT_EQ(r.status, MipStatus::kOptimal);
  // y = 2 needs x = 0 (cost 6); y = 1 would need x = 1.5 > 1.
  EXPECT_EQ(r.values[y], 2.0);
  EXPECT_NEAR(r.values[x], 0.0, 1e-9);
  EXPECT_NEAR(r.objective, 6.0, 1e-9);
}

TEST(SolveMip, RandomAgainstExhaustiveSearch) {
  std::mt19937_64 rng(99173);
  int feasible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const LinearProgram lp = oracle::random_ip(rng);
    const auto expected = oracle::ip_exhaustive_optimum(lp);
    const auto r = solve_mip(lp, 30.0);
    if (!expected) {
      EXPECT_EQ(r.status, MipStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(r.status, MipStatus::kOptimal) << "trial " << trial;
    EXPECT_EQ(r.objective, *expected) << "trial " << trial;
    for (int j = 0; j < lp.num_vars(); ++j) EXPECT_EQ(r.values[j], std::round(r.values[j]));
  }
  EXPECT_GT(feasible, 30);
}

TEST(SolverBackend, BuiltinDelegates) {
  LinearProgram lp;
  const int x = lp.add_variable(1.0, 0.0, kInfinity, true);
  lp.add_row({{x, -2.0}}, Relation::kLessEqual, -3.0);
  const SolverBackend& be = builtin_backend();
  EXPECT_NEAR(be.solve_lp(lp, {}, nullptr).objective, 1.5, 1e-9);
  EXPECT_EQ(be.solve_mip(lp, {}).objective, 2.0);
}
