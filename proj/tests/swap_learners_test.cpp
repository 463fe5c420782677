#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "arena/fpa.hpp"
#include "arena/regret.hpp"
#include "arena/scripted_examples.hpp"
#include "arena/swap_learners.hpp"
#include "test_util.hpp"

namespace arena {
namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

TEST(MonotoneMaps, SmallEnumerations) {
  const auto c22 = enumerate_monotone_maps(2, 2);
  ASSERT_EQ(c22.size(), 3u);
  EXPECT_EQ(c22.strategies[0].choices, (std::vector<int>{0, 0}));
  EXPECT_EQ(c22.strategies[1].choices, (std::vector<int>{0, 1}));
  EXPECT_EQ(c22.strategies[2].choices, (std::vector<int>{1, 1}));
  EXPECT_EQ(enumerate_monotone_maps(1, 7).size(), 7u);
  EXPECT_EQ(enumerate_monotone_maps(2, 3).size(), 6u);
}

TEST(MonotoneMaps, SquareCountsMatchBinomialAndFourToTheN) {
  for (int n = 2; n <= 6; ++n) {
    const auto cover = enumerate_monotone_maps(n, n);
    EXPECT_EQ(static_cast<double>(cover.size()), binomial(2 * n - 1, n));
    EXPECT_LE(static_cast<double>(cover.size()), std::pow(4.0, n));
    for (const auto& f : cover.strategies)
      EXPECT_TRUE(std::is_sorted(f.choices.begin(), f.choices.end()));
  }
}

TEST(MonotoneMaps, CapsAndGuards) {
  const auto capped = enumerate_monotone_maps(2, 5, std::vector<int>{1, 3});
  for (const auto& f : capped.strategies) {
    EXPECT_LE(f(0), 1);
    EXPECT_LE(f(1), 3);
  }
  EXPECT_EQ(capped.size(), 4u + 3u);
  EXPECT_THROW(enumerate_monotone_maps(40, 40), ParameterError);
  EXPECT_THROW(full_cover(10, 8), ParameterError);
  EXPECT_EQ(full_cover(3, 3).size(), 27u);
}

TEST(FpaCoverTest, CappedCoverOnSeparationInstance) {
  const auto inst = separation_instance(2, BidGrid(1.0 / 16, 65));
  const auto cover = fpa_cover(CoverKind::MonotoneCapped, inst);
  EXPECT_EQ(cover.size(), 1617u);
  EXPECT_EQ(fpa_cover(CoverKind::Monotone, inst).size(), 65u * 66 / 2);
  const auto pruned = fpa_cover(CoverKind::Full, inst, 17);
  EXPECT_EQ(pruned.size(), 18u * 18);
  EXPECT_EQ(pruned.n_actions, 65);
}

TEST(Stationary, TwoCycleAndFixedRows) {
  const auto swap = stationary_distribution(std::vector<double>{0, 1, 1, 0}, 2);
  EXPECT_NEAR(swap.p[0], 0.5, 1e-12);
  EXPECT_NEAR(swap.p[1], 0.5, 1e-12);
  const std::vector<double> p{0.2, 0.5, 0.3};
  std::vector<double> q;
  for (int r = 0; r < 3; ++r) q.insert(q.end(), p.begin(), p.end());
  const auto st = stationary_distribution(q, 3);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(st.p[k], p[k], 1e-12);
}

TEST(Stationary, IdentityReturnsUniform) {
  const auto st = stationary_distribution(std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1}, 3);
  for (double x : st.p) EXPECT_NEAR(x, 1.0 / 3, 1e-15);
}

TEST(Stationary, PeriodicChainFromSkewedStartUsesDirectSolve) {
  detail::RowMatrix q(2, 2);
  q << 0, 1, 1, 0;
  Eigen::RowVectorXd warm(2);
  warm << 0.9, 0.1;
  const auto st = stationary_distribution(q, warm);
  EXPECT_NEAR(st.p[0], 0.5, 1e-12);
  EXPECT_LE(st.residual, kStationaryTol);
}

TEST(Stationary, RandomChainsAgainstLongPowerIteration) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + rep % 7;
    std::vector<double> q;
    for (int r = 0; r < n; ++r) {
      const auto row = testing::random_simplex(rng, n);
      q.insert(q.end(), row.begin(), row.end());
    }
    const auto st = stationary_distribution(q, n);
    EXPECT_LE(st.residual, kStationaryTol);
    std::vector<double> p(n, 1.0 / n), next(n);
    for (int it = 0; it < 20000; ++it) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) next[j] += p[i] * q[i * n + j];
      p = next;
    }
    for (int k = 0; k < n; ++k) EXPECT_NEAR(st.p[k], p[k], 1e-9);
  }
}

TEST(SwapExpertBankTest, UniformStartAndResidualEveryStep) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SwapExpertBank bank(6, SwapExpertBank::default_eta(6, 500, 1.0));
  for (double x : bank.p()) EXPECT_DOUBLE_EQ(x, 1.0 / 6);
  std::vector<double> r(6);
  for (int t = 0; t < 500; ++t) {
    for (double& x : r) x = u(rng);
    const auto p = bank.step(r);
    double s = 0.0;
    for (double x : p) s += x;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_LE(bank.last_residual(), kStationaryTol);
  }
  EXPECT_LE(bank.max_residual(), kStationaryTol);
  EXPECT_EQ(bank.steps(), 500);
}

TEST(SwapExpertBankTest, ExpertRowsAreScaledSoftmax) {
  SwapExpertBank bank(2, 1.0);
  bank.step(std::vector<double>{std::log(2.0) * 2, 0.0});  // p was uniform, so each expert sees half
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(bank.q()(i, 0), 2.0 / 3, 1e-15);
    EXPECT_NEAR(bank.q()(i, 1), 1.0 / 3, 1e-15);
  }
  EXPECT_NEAR(bank.p()[0], 2.0 / 3, 1e-12);
}

TEST(SwapExpertBankTest, SwapRegretIsSublinear) {
  // matching pennies-like reward stream drawn against the bank
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 4;
  const long T = 3000;
  SwapExpertBank bank(n, SwapExpertBank::default_eta(n, T, 1.0));
  std::vector<double> mass(n * n, 0.0), r(n);  // mass[f][h] = sum_t p_t(f) r_t(h)
  for (long t = 0; t < T; ++t) {
    for (int k = 0; k < n; ++k) r[k] = u(rng) < 0.3 + 0.1 * k ? 1.0 : 0.0;
    auto p = bank.p();
    for (int f = 0; f < n; ++f)
      for (int h = 0; h < n; ++h) mass[f * n + h] += p[f] * r[h];
    bank.step(r);
  }
  double swap = 0.0;
  for (int f = 0; f < n; ++f) {
    double best = -INFINITY;
    for (int h = 0; h < n; ++h) best = std::max(best, mass[f * n + h]);
    swap += best - mass[f * n + f];
  }
  EXPECT_LE(swap, 2.0 * std::sqrt(2.0 * n * std::log(n) * T));
}

TEST(PolytopeSwapLearnerTest, SingletonCoverIsPointMass) {
  const auto g = example_6_2(3).game;
  CoverSpec cover{CoverKind::Full, 2, 2, {PureStrategy{{1, 0}}}};
  PolytopeSwapLearner l(g, cover, 5);
  EXPECT_EQ(l.profile().data(), (std::vector<double>{0, 1, 1, 0}));
  l.observe(std::vector<double>{0, 0, 2, 1});
  EXPECT_EQ(l.profile().data(), (std::vector<double>{0, 1, 1, 0}));
}

TEST(PolytopeSwapLearnerTest, UniformOverCoverAtRoundOne) {
  const auto g = example_6_2(3).game;
  PolytopeSwapLearner l(g, enumerate_monotone_maps(2, 2), 5);
  EXPECT_NEAR(l.profile()(0, 0), 2.0 / 3, 1e-15);  // (0,0) and (0,1) put context 0 on action 0
  EXPECT_NEAR(l.profile()(1, 1), 2.0 / 3, 1e-15);
  const auto d = l.strategy_distribution();
  ASSERT_EQ(d.support.size(), 3u);
  EXPECT_TRUE(equivalent(behavioral_marginals(d, 2, 2), l.profile()));
}

TEST(PolytopeSwapLearnerTest, MetaRewardOfConstantStrategy) {
  const auto g = example_6_2(3).game;
  EXPECT_DOUBLE_EQ(detail::pure_meta_utility(g, 0, PureStrategy{{0, 0}}), 1.0);
}

TEST(PolytopeSwapLearnerTest, RejectsBadCover) {
  const auto g = example_6_2(3).game;
  EXPECT_THROW(PolytopeSwapLearner(g, CoverSpec{CoverKind::Full, 2, 2, {}}, 5), ParameterError);
  EXPECT_THROW(PolytopeSwapLearner(g, CoverSpec{CoverKind::Full, 2, 2, {PureStrategy{{0, 3}}}}, 5), ShapeError);
}

TEST(MonotoneBestResponse, ZeroBidCommitment) {
  FpaInstance inst{BidGrid(0.25, 5), 1.0, {0.5, 0.75}, {0.5, 0.5}};
  const auto g = build_fpa(inst);
  const auto chk = verify_monotone_best_response(g, OptimizerMixed::point(5, 0));
  EXPECT_TRUE(chk.ok);
  EXPECT_EQ(chk.witness.choices, (std::vector<int>{0, 0}));
}

TEST(MonotoneBestResponse, RandomMixturesAlwaysAdmitMonotoneResponse) {
  std::mt19937_64 rng(13);
  for (const auto& inst : {FpaInstance{BidGrid(0.25, 5), 1.0, {0.5, 0.75}, {0.5, 0.5}},
                           FpaInstance{BidGrid(0.25, 5), 1.0, {0.5}, {1.0}}}) {
    const auto g = build_fpa(inst);
    for (int rep = 0; rep < 200; ++rep) {
      OptimizerMixed alpha{testing::random_simplex(rng, 5)};
      const auto chk = verify_monotone_best_response(g, alpha);
      ASSERT_TRUE(chk.ok);
      EXPECT_TRUE(is_best_response(g, alpha, chk.witness));
    }
  }
}

}  // namespace
}  // namespace arena
