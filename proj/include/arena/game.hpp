#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arena/error.hpp"

namespace arena {

inline constexpr double kTieTol = 1e-9;
inline constexpr double kProbTol = 1e-12;

inline void check_probability_vector(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw DomainError(std::string(what) + ": empty probability vector");
  double s = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw DomainError(std::string(what) + ": negative or non-finite probability");
    s += x;
  }
  if (std::abs(s - 1.0) > kProbTol)
    throw DomainError(std::string(what) + ": probabilities sum to " + std::to_string(s));
}

// A map from contexts to learner actions.
struct PureStrategy {
  std::vector<int> choices;

  int operator()(int c) const { return choices[c]; }
  int n_contexts() const { return static_cast<int>(choices.size()); }
  friend bool operator==(const PureStrategy&, const PureStrategy&) = default;
  friend auto operator<=>(const PureStrategy&, const PureStrategy&) = default;
};

// Lexicographic rank with context 0 most significant.
inline std::int64_t strategy_index(const PureStrategy& f, int n_actions) {
  std::int64_t k = 0;
  for (int a : f.choices) k = k * n_actions + a;
  return k;
}

inline PureStrategy strategy_from_index(std::int64_t k, int n_actions, int n_contexts) {
  PureStrategy f{std::vector<int>(n_contexts)};
  for (int c = n_contexts - 1; c >= 0; --c) {
    f.choices[c] = static_cast<int>(k % n_actions);
    k /= n_actions;
  }
  return f;
}

inline std::int64_t count_pure_strategies(int n_actions, int n_contexts) {
  std::int64_t k = 1;
  for (int c = 0; c < n_contexts; ++c) {
    if (k > (std::int64_t{1} << 40) / std::max(n_actions, 1))
      throw DomainError("pure strategy space too large to enumerate");
    k *= n_actions;
  }
  return k;
}

struct OptimizerMixed {
  std::vector<double> probs;

  static OptimizerMixed point(int m_actions, int i) {
    OptimizerMixed a{std::vector<double>(m_actions, 0.0)};
    a.probs.at(i) = 1.0;
    return a;
  }
  int size() const { return static_cast<int>(probs.size()); }
};

struct StrategyDistribution {
  std::vector<std::pair<PureStrategy, double>> support;

  static StrategyDistribution point(PureStrategy f) { return {{{std::move(f), 1.0}}}; }
  double total() const {
    double s = 0.0;
    for (const auto& [f, w] : support) s += w;
    return s;
  }
};

// Per-context action distributions, stored context-major: probs[c * n_actions + j].
class BehavioralProfile {
 public:
  BehavioralProfile() = default;
  BehavioralProfile(int n_actions, int n_contexts)
      : n_actions_(n_actions), n_contexts_(n_contexts),
        probs_(static_cast<std::size_t>(n_actions) * n_contexts, 0.0) {}

  static BehavioralProfile point(const PureStrategy& f, int n_actions) {
    BehavioralProfile b(n_actions, f.n_contexts());
    for (int c = 0; c < f.n_contexts(); ++c) b(f(c), c) = 1.0;
    return b;
  }
  static BehavioralProfile uniform(int n_actions, int n_contexts) {
    BehavioralProfile b(n_actions, n_contexts);
    std::fill(b.probs_.begin(), b.probs_.end(), 1.0 / n_actions);
    return b;
  }

  int n_actions() const { return n_actions_; }
  int n_contexts() const { return n_contexts_; }
  double& operator()(int j, int c) { return probs_[static_cast<std::size_t>(c) * n_actions_ + j]; }
  double operator()(int j, int c) const { return probs_[static_cast<std::size_t>(c) * n_actions_ + j]; }
  std::span<double> row(int c) { return {probs_.data() + static_cast<std::size_t>(c) * n_actions_, static_cast<std::size_t>(n_actions_)}; }
  std::span<const double> row(int c) const {
    return {probs_.data() + static_cast<std::size_t>(c) * n_actions_, static_cast<std::size_t>(n_actions_)};
  }
  const std::vector<double>& data() const { return probs_; }
  std::vector<double>& data() { return probs_; }

  void validate() const {
    for (int c = 0; c < n_contexts_; ++c) {
      double s = 0.0;
      for (double x : row(c)) {
        if (!(x >= 0.0)) throw DomainError("behavioral profile: negative entry");
        s += x;
      }
      if (std::abs(s - 1.0) > kProbTol) throw DomainError("behavioral profile: row does not sum to 1");
    }
  }

  friend bool operator==(const BehavioralProfile&, const BehavioralProfile&) = default;

 private:
  int n_actions_ = 0;
  int n_contexts_ = 0;
  std::vector<double> probs_;
};

class BayesianGame {
 public:
  BayesianGame() = default;
  // Tensors are flat with index ((i * N) + j) * C + c.
  BayesianGame(int m_actions, int n_actions, int n_contexts, std::vector<double> prior,
               std::vector<double> u_opt, std::vector<double> u_learner)
      : m_(m_actions), n_(n_actions), c_(n_contexts), prior_(std::move(prior)),
        u_opt_(std::move(u_opt)), u_learner_(std::move(u_learner)) {
    if (m_ < 1 || n_ < 1 || c_ < 1) throw ShapeError("game: action and context counts must be positive");
    const std::size_t size = static_cast<std::size_t>(m_) * n_ * c_;
    if (static_cast<int>(prior_.size()) != c_) throw ShapeError("game: prior length differs from context count");
    if (u_opt_.size() != size || u_learner_.size() != size)
      throw ShapeError("game: utility tensors must have shape M x N x C");
    check_probability_vector(prior_, "game prior");
    for (std::size_t k = 0; k < size; ++k) {
      if (!std::isfinite(u_opt_[k]) || !std::isfinite(u_learner_[k]))
        throw DomainError("game: non-finite utility");
      u_max_ = std::max({u_max_, std::abs(u_opt_[k]), std::abs(u_learner_[k])});
    }
  }

  int m_actions() const { return m_; }
  int n_actions() const { return n_; }
  int n_contexts() const { return c_; }
  const std::vector<double>& prior() const { return prior_; }
  double prior(int c) const { return prior_[c]; }
  double utility_bound() const { return u_max_; }

  double u_opt(int i, int j, int c) const { return u_opt_[index(i, j, c)]; }
  double u_learner(int i, int j, int c) const { return u_learner_[index(i, j, c)]; }
  const std::vector<double>& u_opt_tensor() const { return u_opt_; }
  const std::vector<double>& u_learner_tensor() const { return u_learner_; }

  std::size_t index(int i, int j, int c) const {
    return (static_cast<std::size_t>(i) * n_ + j) * c_ + c;
  }

 private:
  int m_ = 0, n_ = 0, c_ = 0;
  std::vector<double> prior_;
  std::vector<double> u_opt_, u_learner_;
  double u_max_ = 0.0;
};

inline void check_alpha(const BayesianGame& g, const OptimizerMixed& alpha) {
  if (alpha.size() != g.m_actions()) throw ShapeError("optimizer mixed strategy has wrong length");
  check_probability_vector(alpha.probs, "optimizer mixed strategy");
}

inline void check_strategy(const BayesianGame& g, const PureStrategy& f) {
  if (f.n_contexts() != g.n_contexts()) throw ShapeError("pure strategy has wrong number of contexts");
  for (int a : f.choices)
    if (a < 0 || a >= g.n_actions()) throw ShapeError("pure strategy action out of range");
}

inline void check_profile(const BayesianGame& g, const BehavioralProfile& b) {
  if (b.n_actions() != g.n_actions() || b.n_contexts() != g.n_contexts())
    throw ShapeError("behavioral profile shape differs from game");
}

// u(alpha, j, c) = sum_i alpha_i u(i, j, c)
inline double learner_utility(const BayesianGame& g, const OptimizerMixed& alpha, int j, int c) {
  double s = 0.0;
  for (int i = 0; i < g.m_actions(); ++i)
    if (alpha.probs[i] != 0.0) s += alpha.probs[i] * g.u_learner(i, j, c);
  return s;
}

inline double optimizer_utility(const BayesianGame& g, const OptimizerMixed& alpha, int j, int c) {
  double s = 0.0;
  for (int i = 0; i < g.m_actions(); ++i)
    if (alpha.probs[i] != 0.0) s += alpha.probs[i] * g.u_opt(i, j, c);
  return s;
}

struct UtilityPair {
  double opt = 0.0;
  double learner = 0.0;
};

inline UtilityPair expected_utilities(const BayesianGame& g, const OptimizerMixed& alpha,
                                      const StrategyDistribution& beta) {
  check_alpha(g, alpha);
  UtilityPair u;
  for (const auto& [f, w] : beta.support) {
    check_strategy(g, f);
    for (int c = 0; c < g.n_contexts(); ++c) {
      u.opt += w * g.prior(c) * optimizer_utility(g, alpha, f(c), c);
      u.learner += w * g.prior(c) * learner_utility(g, alpha, f(c), c);
    }
  }
  return u;
}

inline UtilityPair expected_utilities(const BayesianGame& g, const OptimizerMixed& alpha,
                                      const PureStrategy& f) {
  return expected_utilities(g, alpha, StrategyDistribution::point(f));
}

inline UtilityPair expected_utilities(const BayesianGame& g, const OptimizerMixed& alpha,
                                      const BehavioralProfile& beta) {
  check_alpha(g, alpha);
  check_profile(g, beta);
  UtilityPair u;
  for (int c = 0; c < g.n_contexts(); ++c)
    for (int j = 0; j < g.n_actions(); ++j) {
      const double w = beta(j, c) * g.prior(c);
      if (w == 0.0) continue;
      u.opt += w * optimizer_utility(g, alpha, j, c);
      u.learner += w * learner_utility(g, alpha, j, c);
    }
  return u;
}

// Utilities against a single optimizer action, in expectation over contexts and profile.
inline UtilityPair round_utilities(const BayesianGame& g, int i, const BehavioralProfile& beta) {
  UtilityPair u;
  for (int c = 0; c < g.n_contexts(); ++c) {
    double so = 0.0, sl = 0.0;
    for (int j = 0; j < g.n_actions(); ++j) {
      const double b = beta(j, c);
      if (b == 0.0) continue;
      so += b * g.u_opt(i, j, c);
      sl += b * g.u_learner(i, j, c);
    }
    u.opt += g.prior(c) * so;
    u.learner += g.prior(c) * sl;
  }
  return u;
}

struct BestResponse {
  std::vector<std::vector<int>> sets;  // per context, ascending
  PureStrategy optimizer_favoring;
};

inline BestResponse best_response(const BayesianGame& g, const OptimizerMixed& alpha) {
  check_alpha(g, alpha);
  BestResponse br;
  br.optimizer_favoring.choices.resize(g.n_contexts());
  std::vector<double> ul(g.n_actions());
  for (int c = 0; c < g.n_contexts(); ++c) {
    double best = -INFINITY;
    for (int j = 0; j < g.n_actions(); ++j) {
      ul[j] = learner_utility(g, alpha, j, c);
      best = std::max(best, ul[j]);
    }
    std::vector<int> set;
    int pick = -1;
    double pick_uo = -INFINITY;
    for (int j = 0; j < g.n_actions(); ++j) {
      if (ul[j] < best - kTieTol) continue;
      set.push_back(j);
      const double uo = optimizer_utility(g, alpha, j, c);
      if (uo > pick_uo + kTieTol) {
        pick = j;
        pick_uo = uo;
      }
    }
    br.sets.push_back(std::move(set));
    br.optimizer_favoring.choices[c] = pick;
  }
  return br;
}

// Whether f(c) is a best response in every context, with tolerance tol.
inline bool is_best_response(const BayesianGame& g, const OptimizerMixed& alpha, const PureStrategy& f,
                             double tol = kTieTol) {
  check_strategy(g, f);
  for (int c = 0; c < g.n_contexts(); ++c) {
    const double uf = learner_utility(g, alpha, f(c), c);
    for (int j = 0; j < g.n_actions(); ++j)
      if (learner_utility(g, alpha, j, c) > uf + tol) return false;
  }
  return true;
}

inline BehavioralProfile behavioral_marginals(const StrategyDistribution& beta, int n_contexts,
                                              int n_actions) {
  BehavioralProfile b(n_actions, n_contexts);
  for (const auto& [f, w] : beta.support) {
    if (f.n_contexts() != n_contexts) throw ShapeError("strategy distribution: wrong context count");
    for (int c = 0; c < n_contexts; ++c) b(f(c), c) += w;
  }
  return b;
}

inline bool equivalent(const BehavioralProfile& a, const BehavioralProfile& b, double tol = kProbTol) {
  if (a.n_actions() != b.n_actions() || a.n_contexts() != b.n_contexts()) return false;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    if (std::abs(a.data()[k] - b.data()[k]) > tol) return false;
  return true;
}

}  // namespace arena
