#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "arena/error.hpp"
#include "arena/game.hpp"
#include "arena/rng.hpp"
#include "arena/trace.hpp"

namespace arena {

// Reward matrix of optimizer action i: r[c * N + j] = u_L(i, j, c).
inline std::vector<double> learner_rewards(const BayesianGame& g, int i) {
  std::vector<double> r(static_cast<std::size_t>(g.n_actions()) * g.n_contexts());
  for (int c = 0; c < g.n_contexts(); ++c)
    for (int j = 0; j < g.n_actions(); ++j) r[static_cast<std::size_t>(c) * g.n_actions() + j] = g.u_learner(i, j, c);
  return r;
}

// Reward matrices for every optimizer action, computed once per game.
class RewardTable {
 public:
  explicit RewardTable(const BayesianGame& g) {
    for (int i = 0; i < g.m_actions(); ++i) rows_.push_back(learner_rewards(g, i));
  }
  std::span<const double> operator[](int i) const { return rows_[i]; }

 private:
  std::vector<std::vector<double>> rows_;
};

struct CumulativeRewards {
  int n_actions = 0;
  int n_contexts = 0;
  long rounds = 0;
  std::vector<double> sigma;  // context-major

  CumulativeRewards() = default;
  CumulativeRewards(int n, int c) : n_actions(n), n_contexts(c), sigma(static_cast<std::size_t>(n) * c, 0.0) {}

  void add(std::span<const double> rewards) {
    if (rewards.size() != sigma.size()) throw ShapeError("reward vector has wrong length");
    for (std::size_t k = 0; k < sigma.size(); ++k) sigma[k] += rewards[k];
    ++rounds;
  }
  std::span<const double> row(int c) const {
    return {sigma.data() + static_cast<std::size_t>(c) * n_actions, static_cast<std::size_t>(n_actions)};
  }
};

struct MeanBasedParams {
  double gamma = 0.0;
  long horizon = 0;
  double threshold() const { return gamma * static_cast<double>(horizon); }
};

// { j : sigma_j >= max sigma - threshold }
inline std::vector<int> mean_based_set(std::span<const double> sigma_row, double threshold) {
  std::vector<int> out;
  if (sigma_row.empty()) return out;
  const double mx = *std::max_element(sigma_row.begin(), sigma_row.end());
  for (std::size_t j = 0; j < sigma_row.size(); ++j)
    if (sigma_row[j] >= mx - threshold) out.push_back(static_cast<int>(j));
  return out;
}

inline std::vector<int> mean_based_set(std::span<const double> sigma_row, const MeanBasedParams& p) {
  return mean_based_set(sigma_row, p.threshold());
}

// A learner exposes its mixture for the coming round and consumes the full reward matrix after it.
class Learner {
 public:
  Learner(int n_actions, int n_contexts, long horizon)
      : profile_(n_actions, n_contexts), horizon_(horizon) {
    if (horizon < 1) throw ParameterError("learner horizon must be positive");
  }
  virtual ~Learner() = default;

  const BehavioralProfile& profile() const { return profile_; }
  long rounds_elapsed() const { return elapsed_; }
  long horizon() const { return horizon_; }
  virtual std::string kind() const = 0;

  void observe(std::span<const double> rewards) {
    if (elapsed_ >= horizon_) throw HorizonError("learner stepped past its horizon of " + std::to_string(horizon_));
    if (rewards.size() != profile_.data().size()) throw ShapeError("reward vector has wrong length");
    ++elapsed_;
    update(rewards);
  }

 protected:
  virtual void update(std::span<const double> rewards) = 0;

  BehavioralProfile profile_;

 private:
  long horizon_;
  long elapsed_ = 0;
};

struct LearnerStep {
  std::span<const double> row;
  int action = 0;
};

inline LearnerStep learner_step(const Learner& learner, int context, double u) {
  auto row = learner.profile().row(context);
  return {row, sample_index(row, u)};
}

// Learners whose mixture is a function of cumulative rewards only.
class CumulativeLearner : public Learner {
 public:
  CumulativeLearner(int n_actions, int n_contexts, long horizon)
      : Learner(n_actions, n_contexts, horizon), sigma_(n_actions, n_contexts) {}

  const CumulativeRewards& sigma() const { return sigma_; }

 protected:
  void update(std::span<const double> rewards) override {
    sigma_.add(rewards);
    for (int c = 0; c < sigma_.n_contexts; ++c) recompute(c);
  }
  void recompute_all() {
    for (int c = 0; c < sigma_.n_contexts; ++c) recompute(c);
  }
  virtual void recompute(int c) = 0;

  static int leader(std::span<const double> s) {
    return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());  // first max
  }

  CumulativeRewards sigma_;
};

class FollowTheLeader final : public CumulativeLearner {
 public:
  FollowTheLeader(int n_actions, int n_contexts, long horizon) : CumulativeLearner(n_actions, n_contexts, horizon) {
    recompute_all();
  }
  std::string kind() const override { return "ftl"; }

 protected:
  void recompute(int c) override {
    auto row = profile_.row(c);
    std::fill(row.begin(), row.end(), 0.0);
    row[leader(sigma_.row(c))] = 1.0;
  }
};

class Hedge final : public CumulativeLearner {
 public:
  static double default_eta(int n_actions, long horizon, double u_max) {
    if (n_actions < 2) return 0.0;
    return std::sqrt(8.0 * std::log(static_cast<double>(n_actions)) / horizon) / std::max(u_max, 1e-300);
  }

  Hedge(int n_actions, int n_contexts, long horizon, double eta)
      : CumulativeLearner(n_actions, n_contexts, horizon), eta_(eta) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ParameterError("hedge learning rate must be finite and >= 0");
    recompute_all();
  }
  std::string kind() const override { return "hedge"; }
  double eta() const { return eta_; }

 protected:
  void recompute(int c) override {
    auto s = sigma_.row(c);
    auto row = profile_.row(c);
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) z += row[j] = std::exp(eta_ * (s[j] - mx));
    for (double& x : row) x /= z;
  }

 private:
  double eta_;
};

// (1 - e_t) on the leader plus e_t spread uniformly, e_t = min(1, t^(-1/3) (N ln t)^(1/3)).
class EpsilonGreedy final : public CumulativeLearner {
 public:
  EpsilonGreedy(int n_actions, int n_contexts, long horizon) : CumulativeLearner(n_actions, n_contexts, horizon) {
    recompute_all();
  }
  std::string kind() const override { return "eps_greedy"; }

  static double exploration(long t, int n_actions) {
    const double td = static_cast<double>(t);
    return std::min(1.0, std::cbrt(n_actions * std::log(td) / td));
  }

 protected:
  void recompute(int c) override {
    const double e = exploration(rounds_elapsed() + 1, sigma_.n_actions);
    auto row = profile_.row(c);
    std::fill(row.begin(), row.end(), e / sigma_.n_actions);
    row[leader(sigma_.row(c))] += 1.0 - e;
  }
};

enum class SigmaConvention {
  DecisionTime,  // sigma through round t-1, what the learner can see when choosing
  Literal,       // sigma through round t, as written in the mean-based definition
};

struct MeanBasedReport {
  long rounds = 0;
  long violations = 0;                  // realized action outside the mean-based set
  std::vector<long> mean_based_rounds;  // 1-based rounds that are mean-based
  double max_action_prob = 0.0;         // largest probability on a single non-mean-based action
  double mean_violation_mass = 0.0;     // average probability mass outside the set
  double violation_fraction() const { return rounds ? static_cast<double>(violations) / rounds : 0.0; }
};

inline MeanBasedReport verify_mean_based(const Trace& trace, const BayesianGame& g, const MeanBasedParams& params,
                                         SigmaConvention conv = SigmaConvention::Literal) {
  MeanBasedReport rep;
  CumulativeRewards sigma(g.n_actions(), g.n_contexts());
  const RewardTable table(g);
  const double thr = params.threshold();
  double mass_sum = 0.0;
  for (const auto& r : trace.records) {
    if (conv == SigmaConvention::Literal) sigma.add(table[r.opt_action]);
    auto row = sigma.row(r.context);
    const double mx = *std::max_element(row.begin(), row.end());
    ++rep.rounds;
    if (row[r.learner_action] < mx - thr)
      ++rep.violations;
    else
      rep.mean_based_rounds.push_back(r.round);
    if (r.profile.n_actions() > 0) {
      double mass = 0.0;
      for (int j = 0; j < g.n_actions(); ++j)
        if (row[j] < mx - thr) {
          const double p = r.profile(j, r.context);
          mass += p;
          rep.max_action_prob = std::max(rep.max_action_prob, p);
        }
      mass_sum += mass;
    }
    if (conv == SigmaConvention::DecisionTime) sigma.add(table[r.opt_action]);
  }
  rep.mean_violation_mass = rep.rounds ? mass_sum / rep.rounds : 0.0;
  return rep;
}

struct LearnerSpec {
  std::string kind = "hedge";  // hedge | ftl | eps_greedy
  double eta = 0.0;            // hedge only; 0 selects the default rate
};

inline std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const BayesianGame& g, long horizon) {
  if (spec.kind == "hedge") {
    const double eta = spec.eta > 0.0 ? spec.eta : Hedge::default_eta(g.n_actions(), horizon, g.utility_bound());
    return std::make_unique<Hedge>(g.n_actions(), g.n_contexts(), horizon, eta);
  }
  if (spec.kind == "ftl") return std::make_unique<FollowTheLeader>(g.n_actions(), g.n_contexts(), horizon);
  if (spec.kind == "eps_greedy") return std::make_unique<EpsilonGreedy>(g.n_actions(), g.n_contexts(), horizon);
  throw ConfigError("unknown learner kind '" + spec.kind + "'");
}

}  // namespace arena
