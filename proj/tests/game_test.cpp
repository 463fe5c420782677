#include <gtest/gtest.h>

#include <random>

#include "arena/game.hpp"
#include "arena/scripted_examples.hpp"
#include "test_util.hpp"

namespace arena {
namespace {

TEST(PureStrategyIndex, RoundTripsAndCounts) {
  EXPECT_EQ(count_pure_strategies(3, 4), 81);
  for (std::int64_t k = 0; k < 81; ++k) EXPECT_EQ(strategy_index(strategy_from_index(k, 3, 4), 3), k);
  EXPECT_EQ(strategy_from_index(5, 3, 2).choices, (std::vector<int>{1, 2}));
}

TEST(BayesianGameTest, RejectsBadShapesAndPriors) {
  const std::vector<double> t(8, 0.0);
  EXPECT_THROW(BayesianGame(2, 2, 2, {0.5, 0.5}, std::vector<double>(7, 0.0), t), ShapeError);
  EXPECT_THROW(BayesianGame(2, 2, 2, {0.6, 0.5}, t, t), DomainError);
  EXPECT_THROW(BayesianGame(2, 2, 2, {1.5, -0.5}, t, t), DomainError);
  EXPECT_THROW(BayesianGame(0, 2, 2, {0.5, 0.5}, t, t), ShapeError);
  std::vector<double> bad = t;
  bad[3] = std::nan("");
  EXPECT_THROW(BayesianGame(2, 2, 2, {0.5, 0.5}, t, bad), DomainError);
}

TEST(ExpectedUtilities, PointMassesOnSecondScriptedGame) {
  const auto g = example_6_2(3).game;
  const auto a1 = OptimizerMixed::point(2, 0);
  EXPECT_DOUBLE_EQ(expected_utilities(g, a1, PureStrategy{{1, 0}}).learner, 1.0);
  const OptimizerMixed half{{0.5, 0.5}};
  EXPECT_DOUBLE_EQ(learner_utility(g, half, 1, 1), 1.5);
  EXPECT_DOUBLE_EQ(expected_utilities(g, half, PureStrategy{{1, 1}}).learner, 0.75);
}

TEST(ExpectedUtilities, DistributionProfileAndPureAgree) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = testing::random_game(rng, 3, 3, 2);
    const OptimizerMixed alpha{testing::random_simplex(rng, 3)};
    StrategyDistribution d;
    const auto w = testing::random_simplex(rng, 9);
    for (int k = 0; k < 9; ++k) d.support.emplace_back(strategy_from_index(k, 3, 2), w[k]);
    const auto viaDist = expected_utilities(g, alpha, d);
    const auto viaProfile = expected_utilities(g, alpha, behavioral_marginals(d, 2, 3));
    EXPECT_NEAR(viaDist.opt, viaProfile.opt, 1e-12);
    EXPECT_NEAR(viaDist.learner, viaProfile.learner, 1e-12);
    double manual = 0.0;
    for (int i = 0; i < 3; ++i) manual += alpha.probs[i] * round_utilities(g, i, behavioral_marginals(d, 2, 3)).learner;
    EXPECT_NEAR(manual, viaDist.learner, 1e-12);
  }
}

TEST(BestResponseTest, SecondScriptedGameAtEvenMix) {
  const auto g = example_6_2(3).game;
  const auto br = best_response(g, OptimizerMixed{{0.5, 0.5}});
  EXPECT_EQ(br.sets[1], std::vector<int>{1});
  EXPECT_EQ(br.sets[0], (std::vector<int>{0, 1}));
}

TEST(BestResponseTest, AllTiesWhenLearnerUtilityIsZero) {
  const BayesianGame g(2, 3, 2, {0.5, 0.5}, std::vector<double>(12, 1.0), std::vector<double>(12, 0.0));
  const auto br = best_response(g, OptimizerMixed{{0.3, 0.7}});
  for (const auto& s : br.sets) EXPECT_EQ(s, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(br.optimizer_favoring.choices, (std::vector<int>{0, 0}));  // optimizer indifferent: lowest index
}

TEST(BestResponseTest, TieBreakFavoursOptimizer) {
  // learner indifferent between its two actions; optimizer gets 1 only from action 1
  std::vector<double> uo(4, 0.0), ul(4, 0.0);
  uo[1] = 1.0;  // (i=0, j=1, c=0)
  uo[3] = 1.0;  // (i=1, j=1, c=0)
  const BayesianGame g(2, 2, 1, {1.0}, uo, ul);
  const auto br = best_response(g, OptimizerMixed{{0.5, 0.5}});
  EXPECT_EQ(br.optimizer_favoring.choices, std::vector<int>{1});
  EXPECT_TRUE(is_best_response(g, OptimizerMixed{{0.5, 0.5}}, PureStrategy{{0}}));
}

TEST(BehavioralMarginals, DistinctDistributionsShareAClass) {
  StrategyDistribution a{{{PureStrategy{{0, 0}}, 0.5}, {PureStrategy{{1, 1}}, 0.5}}};
  StrategyDistribution b{{{PureStrategy{{0, 1}}, 0.5}, {PureStrategy{{1, 0}}, 0.5}}};
  const auto pa = behavioral_marginals(a, 2, 2), pb = behavioral_marginals(b, 2, 2);
  EXPECT_TRUE(equivalent(pa, pb));
  for (double x : pa.data()) EXPECT_DOUBLE_EQ(x, 0.5);
  const auto point = behavioral_marginals(StrategyDistribution::point(PureStrategy{{2, 0}}), 2, 3);
  EXPECT_EQ(point.data(), (std::vector<double>{0, 0, 1, 1, 0, 0}));
}

TEST(BehavioralMarginals, UniformOverAllStrategiesGivesUniformRows) {
  StrategyDistribution d;
  for (int k = 0; k < 27; ++k) d.support.emplace_back(strategy_from_index(k, 3, 3), 1.0 / 27);
  const auto b = behavioral_marginals(d, 3, 3);
  for (double x : b.data()) EXPECT_NEAR(x, 1.0 / 3, 1e-15);
}

TEST(ProbabilityChecks, RejectWrongLengthsAndNegativeMass) {
  const auto g = example_6_2(3).game;
  EXPECT_THROW(best_response(g, OptimizerMixed{{1.0}}), ShapeError);
  EXPECT_THROW(best_response(g, OptimizerMixed{{1.2, -0.2}}), DomainError);
  EXPECT_THROW(expected_utilities(g, OptimizerMixed{{1.0, 0.0}}, PureStrategy{{0, 2}}), ShapeError);
}

}  // namespace
}  // namespace arena
