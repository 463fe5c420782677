#include <gtest/gtest.h>

#include <random>

#include "arena/lp.hpp"

namespace arena {
namespace {

TEST(LpSolve, SingleBoundedVariable) {
  LinearProgram lp;
  lp.add_var(1.0);
  lp.add_row({{0, 1.0}}, Sense::LessEq, 3.0);
  const auto r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-12);
}

TEST(LpSolve, TwoVariableVertex) {
  LinearProgram lp;
  lp.add_var(1.0);
  lp.add_var(1.0);
  lp.add_row({{0, 1.0}, {1, 2.0}}, Sense::LessEq, 4.0);
  lp.add_row({{0, 3.0}, {1, 1.0}}, Sense::LessEq, 6.0);
  for (auto rule : {PivotRule::Bland, PivotRule::DantzigThenBland}) {
    LpOptions opt;
    opt.rule = rule;
    const auto r = lp_solve(lp, opt);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, 2.8, 1e-12);
    EXPECT_NEAR(r.x[0], 1.6, 1e-12);
    EXPECT_NEAR(r.x[1], 1.2, 1e-12);
  }
}

TEST(LpSolve, Infeasible) {
  LinearProgram lp;
  lp.add_var(1.0);
  lp.add_row({{0, 1.0}}, Sense::LessEq, -1.0);
  EXPECT_EQ(lp_solve(lp).status, LpStatus::Infeasible);
}

TEST(LpSolve, Unbounded) {
  LinearProgram lp;
  lp.add_var(1.0);
  lp.add_var(0.0);
  lp.add_row({{0, 1.0}, {1, -1.0}}, Sense::LessEq, 1.0);
  EXPECT_EQ(lp_solve(lp).status, LpStatus::Unbounded);
}

TEST(LpSolve, EqualityGreaterAndFreeVariables) {
  // max -z s.t. z >= x - 2, z >= 2 - x, x = 3 (z free) -> z = 1
  LinearProgram lp;
  const int x = lp.add_var(0.0);
  const int z = lp.add_var(-1.0, true);
  lp.add_row({{z, 1.0}, {x, -1.0}}, Sense::GreaterEq, -2.0);
  lp.add_row({{z, 1.0}, {x, 1.0}}, Sense::GreaterEq, 2.0);
  lp.add_row({{x, 1.0}}, Sense::Equal, 3.0);
  const auto r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, -1.0, 1e-12);
  EXPECT_NEAR(r.x[z], 1.0, 1e-12);

  // a free variable that must go negative
  LinearProgram neg;
  const int y = neg.add_var(-1.0, true);
  neg.add_row({{y, 1.0}}, Sense::GreaterEq, -5.0);
  const auto rn = lp_solve(neg);
  ASSERT_EQ(rn.status, LpStatus::Optimal);
  EXPECT_NEAR(rn.x[y], -5.0, 1e-12);
}

TEST(LpSolve, RedundantEqualityRows) {
  LinearProgram lp;
  lp.add_var(1.0);
  lp.add_var(2.0);
  lp.add_row({{0, 1.0}, {1, 1.0}}, Sense::Equal, 1.0);
  lp.add_row({{0, 2.0}, {1, 2.0}}, Sense::Equal, 2.0);
  const auto r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(LpSolve, DegenerateCyclingExampleTerminates) {
  // Beale's example cycles under the textbook largest-coefficient rule without an anti-cycling safeguard.
  LinearProgram lp;
  for (double c : {0.75, -150.0, 0.02, -6.0}) lp.add_var(c);
  lp.add_row({{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, Sense::LessEq, 0.0);
  lp.add_row({{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, Sense::LessEq, 0.0);
  lp.add_row({{2, 1.0}}, Sense::LessEq, 1.0);
  for (auto rule : {PivotRule::Bland, PivotRule::DantzigThenBland}) {
    LpOptions opt;
    opt.rule = rule;
    const auto r = lp_solve(lp, opt);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, 0.05, 1e-12);
  }
}

// Vertex enumeration over all 2-row subsets as an independent oracle for random 2-variable programs.
double brute_force_2d(const std::vector<std::array<double, 3>>& rows, double c0, double c1, bool& feasible) {
  std::vector<std::array<double, 3>> all = rows;
  all.push_back({-1.0, 0.0, 0.0});  // -x <= 0
  all.push_back({0.0, -1.0, 0.0});
  double best = -INFINITY;
  feasible = false;
  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      const double det = all[a][0] * all[b][1] - all[a][1] * all[b][0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (all[a][2] * all[b][1] - all[a][1] * all[b][2]) / det;
      const double y = (all[a][0] * all[b][2] - all[a][2] * all[b][0]) / det;
      bool ok = true;
      for (const auto& r : all) ok = ok && r[0] * x + r[1] * y <= r[2] + 1e-9;
      if (!ok) continue;
      feasible = true;
      best = std::max(best, c0 * x + c1 * y);
    }
  return best;
}

TEST(LpSolve, MatchesVertexEnumerationOnRandomBoundedPrograms) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 1.0);
  for (int rep = 0; rep < 300; ++rep) {
    LinearProgram lp;
    const double c0 = u(rng), c1 = u(rng);
    lp.add_var(c0);
    lp.add_var(c1);
    std::vector<std::array<double, 3>> rows;
    rows.push_back({pos(rng), pos(rng), pos(rng) * 4});  // keeps the region bounded
    for (int k = 0; k < 4; ++k) rows.push_back({u(rng), u(rng), u(rng)});
    for (const auto& r : rows) lp.add_row({{0, r[0]}, {1, r[1]}}, Sense::LessEq, r[2]);
    bool feasible = false;
    const double expect = brute_force_2d(rows, c0, c1, feasible);
    const auto got = lp_solve(lp);
    if (!feasible) {
      EXPECT_EQ(got.status, LpStatus::Infeasible);
      continue;
    }
    ASSERT_EQ(got.status, LpStatus::Optimal) << rep;
    EXPECT_NEAR(got.objective, expect, 1e-9) << rep;
  }
}

TEST(LpSolve, RejectsNonFiniteInput) {
  LinearProgram lp;
  lp.add_var(std::nan(""));
  EXPECT_THROW(lp_solve(lp), DomainError);
  LinearProgram bad;
  bad.add_var(1.0);
  bad.add_row({{3, 1.0}}, Sense::LessEq, 1.0);
  EXPECT_THROW(lp_solve(bad), ShapeError);
}

}  // namespace
}  // namespace arena
