#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arena/error.hpp"
#include "arena/fpa.hpp"
#include "arena/game.hpp"
#include "arena/learners.hpp"

namespace arena {

enum class CoverKind { Full, Monotone, MonotoneCapped };

inline const char* to_string(CoverKind k) {
  switch (k) {
    case CoverKind::Full: return "full";
    case CoverKind::Monotone: return "monotone";
    case CoverKind::MonotoneCapped: return "monotone_capped";
  }
  return "?";
}

inline CoverKind parse_cover_kind(const std::string& s) {
  if (s == "full") return CoverKind::Full;
  if (s == "monotone") return CoverKind::Monotone;
  if (s == "monotone_capped") return CoverKind::MonotoneCapped;
  throw ConfigError("unknown cover '" + s + "' (expected full, monotone or monotone_capped)");
}

struct CoverSpec {
  CoverKind kind = CoverKind::Full;
  int n_actions = 0;
  int n_contexts = 0;
  std::vector<PureStrategy> strategies;

  std::size_t size() const { return strategies.size(); }
};

inline constexpr double kMaxCoverSize = 1e7;

// C(n + m - 1, m) as a double, to test against the enumeration guard without overflow.
inline double monotone_count(int n_actions, int n_contexts) {
  double r = 1.0;
  for (int k = 1; k <= n_contexts; ++k) r = r * (n_actions - 1 + k) / k;
  return std::round(r);
}

// Nondecreasing maps contexts -> actions in lexicographic order, optionally with f(c) <= caps[c].
inline CoverSpec enumerate_monotone_maps(int n_contexts, int n_actions,
                                         const std::optional<std::vector<int>>& caps = std::nullopt) {
  if (n_contexts < 1 || n_actions < 1) throw ParameterError("monotone maps need positive sizes");
  if (caps && static_cast<int>(caps->size()) != n_contexts) throw ShapeError("caps length differs from contexts");
  if (monotone_count(n_actions, n_contexts) > kMaxCoverSize)
    throw ParameterError("monotone cover would exceed 1e7 strategies");
  CoverSpec cover{caps ? CoverKind::MonotoneCapped : CoverKind::Monotone, n_actions, n_contexts, {}};
  std::vector<int> cur(n_contexts, 0);
  auto cap = [&](int c) { return caps ? std::min((*caps)[c], n_actions - 1) : n_actions - 1; };
  auto rec = [&](auto&& self, int c, int lo) -> void {
    if (c == n_contexts) {
      cover.strategies.push_back(PureStrategy{cur});
      return;
    }
    for (int a = lo; a <= cap(c); ++a) {
      cur[c] = a;
      self(self, c + 1, a);
    }
  };
  rec(rec, 0, 0);
  return cover;
}

inline CoverSpec full_cover(int n_actions, int n_contexts) {
  const auto count = count_pure_strategies(n_actions, n_contexts);
  if (static_cast<double>(count) > kMaxCoverSize) throw ParameterError("full cover would exceed 1e7 strategies");
  CoverSpec cover{CoverKind::Full, n_actions, n_contexts, {}};
  cover.strategies.reserve(count);
  for (std::int64_t k = 0; k < count; ++k) cover.strategies.push_back(strategy_from_index(k, n_actions, n_contexts));
  return cover;
}

// Caps each context's bid at its value: bids above value never beat bidding 0 for the learner.
inline std::vector<int> value_caps(const FpaInstance& inst) {
  std::vector<int> caps;
  for (double v : inst.values) caps.push_back(inst.grid.floor_index(v));
  return caps;
}

// Cover for an FPA game; max_action optionally restricts every context further.
inline CoverSpec fpa_cover(CoverKind kind, const FpaInstance& inst, std::optional<int> max_action = std::nullopt) {
  const int n = inst.grid.n_bids, m = inst.m();
  std::vector<int> caps(m, n - 1);
  if (kind == CoverKind::MonotoneCapped) caps = value_caps(inst);
  if (max_action)
    for (int& c : caps) c = std::min(c, *max_action);
  if (kind == CoverKind::Full) {
    const int width = max_action ? *max_action + 1 : n;
    CoverSpec cover = full_cover(width, m);
    cover.n_actions = n;
    return cover;
  }
  CoverSpec cover = enumerate_monotone_maps(m, n, caps);
  cover.kind = kind;
  return cover;
}

struct StationaryResult {
  std::vector<double> p;
  double residual = 0.0;  // ||p - pQ||_1
  long iterations = 0;
  bool direct = false;
};

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double stationary_residual(const RowMatrix& q, const Eigen::RowVectorXd& p) {
  return (p - p * q).lpNorm<1>();
}

}  // namespace detail

inline constexpr double kStationaryTol = 1e-10;

// Stationary distribution p = pQ of a row-stochastic Q. Power iteration from the warm start,
// then a direct solve, then lazy power iteration as the last resort.
inline StationaryResult stationary_distribution(const detail::RowMatrix& q, const Eigen::RowVectorXd& warm,
                                                int power_iters = 200) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n || warm.size() != n) throw ShapeError("stationary distribution: shape mismatch");
  StationaryResult res;
  const double target = kStationaryTol * 0.5;
  Eigen::RowVectorXd p = warm / warm.sum();
  Eigen::RowVectorXd next(n);
  double r = INFINITY;
  for (int it = 0; it < power_iters; ++it) {
    next.noalias() = p * q;
    r = (next - p).lpNorm<1>();  // residual of p itself
    if (r <= target) break;
    p = next / next.sum();
    ++res.iterations;
  }
  if (r > target) r = detail::stationary_residual(q, p);
  if (r > target) {
    Eigen::MatrixXd a = q.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd x = a.fullPivLu().solve(b);
    if (x.allFinite() && x.minCoeff() > -1e-12) {
      Eigen::RowVectorXd cand = x.transpose().cwiseMax(0.0);
      cand /= cand.sum();
      const double rc = detail::stationary_residual(q, cand);
      if (rc < r) {
        p = cand;
        r = rc;
        res.direct = true;
      }
    }
  }
  if (r > target) {
    // Lazy chain (Q + I) / 2 shares the stationary set and cannot oscillate.
    for (long it = 0; it < 100000 && r > target; ++it) {
      next.noalias() = p * q;
      p = 0.5 * (p + next);
      p /= p.sum();
      ++res.iterations;
      if (it % 64 == 0) r = detail::stationary_residual(q, p);
    }
    r = detail::stationary_residual(q, p);
    if (r > 1e-8) throw NumericError("stationary distribution residual " + std::to_string(r) + " after fallback");
  }
  res.p.assign(p.data(), p.data() + n);
  res.residual = r;
  return res;
}

inline StationaryResult stationary_distribution(const std::vector<double>& q_row_major, int n) {
  detail::RowMatrix q = Eigen::Map<const detail::RowMatrix>(q_row_major.data(), n, n);
  return stationary_distribution(q, Eigen::RowVectorXd::Constant(n, 1.0 / n));
}

// Swap-regret reduction: n Hedge experts, expert i sees the reward scaled by p_i, play the
// stationary distribution of the matrix whose rows are the experts' distributions.
class SwapExpertBank {
 public:
  static double default_eta(int n, long horizon, double u_max) {
    if (n < 2) return 0.0;
    return std::sqrt(2.0 * n * std::log(static_cast<double>(n)) / horizon) / std::max(u_max, 1e-300);
  }

  SwapExpertBank(int n, double eta)
      : n_(n), eta_(eta), score_(detail::RowMatrix::Zero(n, n)), q_(detail::RowMatrix::Constant(n, n, 1.0 / n)),
        p_(Eigen::RowVectorXd::Constant(n, 1.0 / n)) {
    if (n < 1) throw ParameterError("expert bank needs at least one action");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ParameterError("expert learning rate must be finite and >= 0");
  }

  int size() const { return n_; }
  double eta() const { return eta_; }
  std::span<const double> p() const { return {p_.data(), static_cast<std::size_t>(n_)}; }
  const detail::RowMatrix& q() const { return q_; }
  double last_residual() const { return last_residual_; }
  double max_residual() const { return max_residual_; }
  long steps() const { return steps_; }
  long power_iterations() const { return power_iterations_; }
  long direct_solves() const { return direct_solves_; }

  // Feeds the reward of the round just played and returns the next distribution.
  std::span<const double> step(std::span<const double> reward) {
    if (static_cast<int>(reward.size()) != n_) throw ShapeError("expert bank reward has wrong length");
    Eigen::Map<const Eigen::RowVectorXd> r(reward.data(), n_);
    for (int i = 0; i < n_; ++i) {
      auto row = score_.row(i);
      row += (eta_ * p_(i)) * r;
      const double mx = row.maxCoeff();
      auto qi = q_.row(i);
      qi = (row.array() - mx).exp().matrix();
      qi /= qi.sum();
    }
    auto st = stationary_distribution(q_, p_);
    p_ = Eigen::Map<const Eigen::RowVectorXd>(st.p.data(), n_);
    last_residual_ = st.residual;
    max_residual_ = std::max(max_residual_, st.residual);
    power_iterations_ += st.iterations;
    direct_solves_ += st.direct;
    ++steps_;
    return p();
  }

 private:
  int n_;
  double eta_;
  detail::RowMatrix score_;  // eta * cumulative scaled reward, expert-major
  detail::RowMatrix q_;
  Eigen::RowVectorXd p_;
  double last_residual_ = 0.0;
  double max_residual_ = 0.0;
  long steps_ = 0;
  long power_iterations_ = 0;
  long direct_solves_ = 0;
};

// Runs the expert bank over the strategies of a cover, each treated as a single meta-action
// with reward sum_c p_c u_L(i, f(c), c), and plays the induced behavioral profile.
class PolytopeSwapLearner final : public Learner {
 public:
  PolytopeSwapLearner(const BayesianGame& g, CoverSpec cover, long horizon, double eta = 0.0)
      : Learner(g.n_actions(), g.n_contexts(), horizon), prior_(g.prior()), cover_(std::move(cover)),
        bank_(check_cover(g, cover_),
              eta > 0.0 ? eta : SwapExpertBank::default_eta(static_cast<int>(cover_.size()), horizon, g.utility_bound())),
        meta_reward_(cover_.size()) {
    project();
  }

  std::string kind() const override { return "polytope_swap"; }
  const CoverSpec& cover() const { return cover_; }
  const SwapExpertBank& bank() const { return bank_; }
  std::span<const double> distribution() const { return bank_.p(); }

  StrategyDistribution strategy_distribution() const {
    StrategyDistribution d;
    auto p = bank_.p();
    for (std::size_t k = 0; k < cover_.size(); ++k)
      if (p[k] > 0.0) d.support.emplace_back(cover_.strategies[k], p[k]);
    return d;
  }

 protected:
  void update(std::span<const double> rewards) override {
    const int n = profile_.n_actions();
    for (std::size_t k = 0; k < cover_.size(); ++k) {
      const auto& f = cover_.strategies[k];
      double s = 0.0;
      for (std::size_t c = 0; c < prior_.size(); ++c) s += prior_[c] * rewards[c * n + f.choices[c]];
      meta_reward_[k] = s;
    }
    bank_.step(meta_reward_);
    project();
  }

 private:
  static int check_cover(const BayesianGame& g, const CoverSpec& cover) {
    if (cover.strategies.empty()) throw ParameterError("polytope swap learner needs a nonempty cover");
    for (const auto& f : cover.strategies) check_strategy(g, f);
    return static_cast<int>(cover.strategies.size());
  }

  void project() {
    auto& d = profile_.data();
    std::fill(d.begin(), d.end(), 0.0);
    auto p = bank_.p();
    for (std::size_t k = 0; k < cover_.size(); ++k)
      for (int c = 0; c < profile_.n_contexts(); ++c) profile_(cover_.strategies[k](c), c) += p[k];
  }

  std::vector<double> prior_;
  CoverSpec cover_;
  SwapExpertBank bank_;
  std::vector<double> meta_reward_;
};

struct MonotoneCheck {
  bool ok = true;
  PureStrategy witness;    // nondecreasing best-response selection when ok
  int failed_context = -1;
};

// Greedy: per context in value order, the smallest best response not below the previous pick.
inline MonotoneCheck verify_monotone_best_response(const BayesianGame& fpa_game, const OptimizerMixed& alpha) {
  const auto br = best_response(fpa_game, alpha);
  MonotoneCheck out;
  int prev = 0;
  for (int c = 0; c < fpa_game.n_contexts(); ++c) {
    const auto& set = br.sets[c];
    auto it = std::lower_bound(set.begin(), set.end(), prev);
    if (it == set.end()) {
      out.ok = false;
      out.failed_context = c;
      return out;
    }
    prev = *it;
    out.witness.choices.push_back(prev);
  }
  return out;
}

}  // namespace arena
