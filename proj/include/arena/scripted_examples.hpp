#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "arena/error.hpp"
#include "arena/game.hpp"
#include "arena/learners.hpp"
#include "arena/optimizers.hpp"

namespace arena {

// Plays a fixed pure strategy on each round range; the mixture depends on the round index only.
class ScriptedRewardLearner final : public Learner {
 public:
  struct Segment {
    long begin = 0;  // 0-based round index, inclusive
    long end = 0;    // exclusive
    PureStrategy strategy;
  };

  ScriptedRewardLearner(int n_actions, int n_contexts, std::vector<Segment> schedule)
      : Learner(n_actions, n_contexts, schedule.empty() ? 1 : schedule.back().end), schedule_(std::move(schedule)) {
    long at = 0;
    for (const auto& s : schedule_) {
      if (s.begin != at || s.end <= s.begin) throw ParameterError("scripted schedule must partition the horizon");
      if (s.strategy.n_contexts() != n_contexts) throw ShapeError("scripted strategy has wrong context count");
      for (int a : s.strategy.choices)
        if (a < 0 || a >= n_actions) throw ShapeError("scripted strategy action out of range");
      at = s.end;
    }
    if (schedule_.empty()) throw ParameterError("scripted schedule is empty");
    load(0);
  }

  std::string kind() const override { return "scripted"; }
  const std::vector<Segment>& schedule() const { return schedule_; }

 protected:
  void update(std::span<const double>) override {
    if (rounds_elapsed() < horizon()) load(rounds_elapsed());
  }

 private:
  void load(long t) {
    for (const auto& s : schedule_)
      if (t >= s.begin && t < s.end) {
        profile_ = BehavioralProfile::point(s.strategy, profile_.n_actions());
        return;
      }
  }

  std::vector<Segment> schedule_;
};

struct ScriptedExample {
  BayesianGame game;
  std::vector<int> optimizer_sequence;
  std::vector<ScriptedRewardLearner::Segment> schedule;

  ScriptedRewardLearner learner() const { return {game.n_actions(), game.n_contexts(), schedule}; }
  long horizon() const { return static_cast<long>(optimizer_sequence.size()); }
};

namespace detail {

// 2x2x2 tensor from entries listed as (i, j, c) with 0-based indices.
inline std::vector<double> tensor222(std::initializer_list<std::pair<std::array<int, 3>, double>> entries) {
  std::vector<double> t(8, 0.0);
  for (const auto& [k, v] : entries) t[(k[0] * 2 + k[1]) * 2 + k[2]] = v;
  return t;
}

}  // namespace detail

// Context 0 is negligible (probability p1); against action 1 the learner misplays context 1.
inline ScriptedExample example_6_1(long T, double p1) {
  if (T < 2 || T % 2 != 0) throw ParameterError("example_6_1 needs an even horizon");
  const double p1_max = std::max(0.01, 1.0 / static_cast<double>(T));
  if (!(p1 >= 0.0 && p1 <= p1_max * (1.0 + 1e-12))) throw ParameterError("example_6_1 needs 0 <= p1 <= max(0.01, 1/T)");
  auto ul = detail::tensor222({{{0, 0, 1}, 1.0}, {{0, 1, 1}, 0.0}, {{1, 0, 1}, 0.0}, {{1, 1, 1}, 0.5}});
  ScriptedExample ex{BayesianGame(2, 2, 2, {p1, 1.0 - p1}, std::vector<double>(8, 0.0), ul), {}, {}};
  ex.optimizer_sequence.assign(T / 2, 0);
  ex.optimizer_sequence.insert(ex.optimizer_sequence.end(), T / 2, 1);
  ex.schedule = {{0, T / 2, PureStrategy{{0, 0}}}, {T / 2, T, PureStrategy{{1, 0}}}};
  return ex;
}

// Uniform prior; three phases of T/3 with the optimizer repeating action 0 in the first two.
inline ScriptedExample example_6_2(long T) {
  if (T < 3 || T % 3 != 0) throw ParameterError("example_6_2 needs a horizon divisible by 3");
  auto ul = detail::tensor222({{{0, 0, 1}, 2.0}, {{0, 1, 1}, 1.0}, {{1, 0, 1}, 0.0}, {{1, 1, 1}, 2.0}});
  ScriptedExample ex{BayesianGame(2, 2, 2, {0.5, 0.5}, std::vector<double>(8, 0.0), ul), {}, {}};
  const long third = T / 3;
  ex.optimizer_sequence.assign(2 * third, 0);
  ex.optimizer_sequence.insert(ex.optimizer_sequence.end(), third, 1);
  ex.schedule = {{0, third, PureStrategy{{1, 0}}},
                 {third, 2 * third, PureStrategy{{0, 1}}},
                 {2 * third, T, PureStrategy{{1, 1}}}};
  return ex;
}

inline SimulationResult run_scripted(const ScriptedExample& ex, std::uint64_t key = 0, std::uint64_t seed = 0,
                                     const BayesianGame* game_override = nullptr) {
  auto learner = ex.learner();
  const auto& g = game_override ? *game_override : ex.game;
  return simulate(g, OptimizerPolicy::oblivious(ex.optimizer_sequence), learner, ex.horizon(), CounterRng(key, seed));
}

struct UtilityIdentityCheck {
  double total = 0.0;           // optimizer utility over the scripted run
  double commit_action0 = 0.0;  // alpha = action 0 against constant action 0
  double commit_even = 0.0;     // alpha = (1/2, 1/2) against constant action 1
  long horizon = 0;
  bool best_responses_hold = false;
  double identity_gap = 0.0;
  bool identity_holds = false;
  bool commitment_dominates = false;  // max of the two commitments times T >= total
};

// Replays the second example's scripted play under alternative optimizer utilities.
inline UtilityIdentityCheck verify_prop_6_5_identity(const std::vector<double>& u_opt_prime, long T = 3) {
  if (u_opt_prime.size() != 8) throw ShapeError("optimizer utilities must be a 2x2x2 tensor");
  for (double x : u_opt_prime)
    if (!std::isfinite(x)) throw DomainError("optimizer utilities must be finite");
  const auto ex = example_6_2(T);
  const BayesianGame g(2, 2, 2, ex.game.prior(), u_opt_prime, ex.game.u_learner_tensor());
  UtilityIdentityCheck out;
  out.horizon = T;
  out.total = run_scripted(ex, 0, 0, &g).opt_expected;

  const OptimizerMixed a1 = OptimizerMixed::point(2, 0), a2{{0.5, 0.5}};
  const PureStrategy all0{{0, 0}}, all1{{1, 1}};
  const auto br1 = best_response(g, a1), br2 = best_response(g, a2);
  out.best_responses_hold = br1.sets[1] == std::vector<int>{0} && br2.sets[1] == std::vector<int>{1} &&
                            is_best_response(g, a1, all0) && is_best_response(g, a2, all1);
  out.commit_action0 = expected_utilities(g, a1, all0).opt;
  out.commit_even = expected_utilities(g, a2, all1).opt;
  out.identity_gap = std::abs(out.total - (out.commit_action0 / 3.0 + 2.0 * out.commit_even / 3.0) * T);
  out.identity_holds = out.identity_gap <= 1e-9 * std::max<double>(1.0, T);
  out.commitment_dominates = std::max(out.commit_action0, out.commit_even) * T >= out.total - 1e-9 * T;
  return out;
}

}  // namespace arena
