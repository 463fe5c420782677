#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "arena/error.hpp"
#include "arena/fpa.hpp"
#include "arena/game.hpp"
#include "arena/lp.hpp"
#include "arena/swap_learners.hpp"

namespace arena {

struct StackelbergSolution {
  double value = 0.0;
  OptimizerMixed alpha;
  PureStrategy best_response;
  std::vector<std::pair<PureStrategy, std::optional<double>>> per_strategy_values;  // nullopt: infeasible
};

struct StackelbergOptions {
  std::vector<char> optimizer_support;  // empty: all optimizer actions allowed
  int threads = 1;
  LpOptions lp;
};

inline constexpr double kVerifyTol = 1e-8;

inline void verify_equilibrium(const BayesianGame& g, const StackelbergSolution& s) {
  if (!is_best_response(g, s.alpha, s.best_response, kVerifyTol))
    throw NumericError("stackelberg: returned strategy is not a best response to alpha");
  const double uo = expected_utilities(g, s.alpha, s.best_response).opt;
  if (std::abs(uo - s.value) > kVerifyTol)
    throw NumericError("stackelberg: value differs from u_O(alpha, f) by " + std::to_string(std::abs(uo - s.value)));
}

// max u_O(alpha, f) over alpha subject to f(c) being a best response in every context.
inline LpResult stackelberg_lp(const BayesianGame& g, const PureStrategy& f, const std::vector<int>& actions,
                               const LpOptions& opt = {}) {
  LinearProgram lp;
  for (int i : actions) {
    double a = 0.0;
    for (int c = 0; c < g.n_contexts(); ++c) a += g.prior(c) * g.u_opt(i, f(c), c);
    lp.add_var(a);
  }
  for (int c = 0; c < g.n_contexts(); ++c)
    for (int j = 0; j < g.n_actions(); ++j) {
      if (j == f(c)) continue;
      std::vector<std::pair<int, double>> terms;
      bool binding = false;
      for (std::size_t k = 0; k < actions.size(); ++k) {
        const double d = g.u_learner(actions[k], j, c) - g.u_learner(actions[k], f(c), c);
        if (d != 0.0) terms.emplace_back(static_cast<int>(k), d);
        if (d > 0.0) binding = true;
      }
      if (binding) lp.add_row(std::move(terms), Sense::LessEq, 0.0);  // rows with d <= 0 hold for any alpha >= 0
    }
  std::vector<std::pair<int, double>> sum;
  for (std::size_t k = 0; k < actions.size(); ++k) sum.emplace_back(static_cast<int>(k), 1.0);
  lp.add_row(std::move(sum), Sense::Equal, 1.0);
  return lp_solve(lp, opt);
}

inline StackelbergSolution stackelberg_solve(const BayesianGame& g, const CoverSpec& cover,
                                             const StackelbergOptions& opt = {}) {
  if (cover.strategies.empty()) throw ParameterError("stackelberg: empty cover");
  std::vector<int> actions;
  for (int i = 0; i < g.m_actions(); ++i)
    if (opt.optimizer_support.empty() || opt.optimizer_support.at(i)) actions.push_back(i);
  if (actions.empty()) throw ParameterError("stackelberg: optimizer support is empty");
  for (const auto& f : cover.strategies) check_strategy(g, f);

  const std::size_t n = cover.strategies.size();
  std::vector<LpResult> results(n);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) results[k] = stackelberg_lp(g, cover.strategies[k], actions, opt.lp);
  };
  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(n)));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, n * t / threads, n * (t + 1) / threads);
    for (auto& th : pool) th.join();
  }

  StackelbergSolution sol;
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = results[k];
    if (r.status == LpStatus::Unbounded) throw NumericError("stackelberg: LP unbounded on a simplex");
    if (r.status == LpStatus::Optimal) {
      sol.per_strategy_values.emplace_back(cover.strategies[k], r.objective);
      if (!best || r.objective > results[*best].objective + 1e-12) best = k;
    } else {
      sol.per_strategy_values.emplace_back(cover.strategies[k], std::nullopt);
    }
  }
  if (!best) throw NumericError("stackelberg: every strategy in the cover is infeasible (cover is not a best-response cover)");
  sol.alpha.probs.assign(g.m_actions(), 0.0);
  for (std::size_t k = 0; k < actions.size(); ++k) sol.alpha.probs[actions[k]] = results[*best].x[k];
  double s = 0.0;
  for (double x : sol.alpha.probs) s += x;
  for (double& x : sol.alpha.probs) x /= s;
  sol.best_response = cover.strategies[*best];
  sol.value = expected_utilities(g, sol.alpha, sol.best_response).opt;
  verify_equilibrium(g, sol);
  return sol;
}

// FPA Stackelberg by LP with optimizer bids restricted to <= v_O and learner bids to <= v_O + eps.
inline StackelbergSolution stackelberg_solve_fpa(const FpaInstance& inst, CoverKind kind, bool prune = true,
                                                 const StackelbergOptions& base = {}) {
  const auto g = build_fpa(inst);
  const int vo = inst.grid.index_checked(inst.v_opt, "optimizer value");
  std::optional<int> max_action;
  StackelbergOptions opt = base;
  if (prune) {
    max_action = std::min(vo + 1, inst.grid.n_bids - 1);
    opt.optimizer_support.assign(inst.grid.n_bids, 0);
    for (int i = 0; i <= vo; ++i) opt.optimizer_support[i] = 1;
  }
  return stackelberg_solve(g, fpa_cover(kind, inst, max_action), opt);
}

struct CharacterizedSolution {
  StackelbergSolution solution;
  StackelbergCdf cdf;
};

// Searches threshold vectors 0 = b_1 <= b_2 <= ... <= b_{m+1} <= v_O with F(b_{m+1}) = 1.
inline CharacterizedSolution fpa_stackelberg_characterized(const FpaInstance& inst) {
  inst.validate();
  const int m = inst.m();
  if (m > 4) throw ParameterError("characterization search supports m <= 4");
  const auto g = build_fpa(inst);
  const int n = inst.grid.n_bids;
  const int top = inst.grid.index_checked(inst.v_opt, "optimizer value");
  const double eps = inst.grid.epsilon;

  CharacterizedSolution best;
  bool found = false;
  std::vector<int> th(m + 1, 0);
  OptimizerMixed alpha{std::vector<double>(n, 0.0)};

  auto consider = [&]() {
    double chain = 1.0;  // F(b_{m+1}) / F(0)
    for (int i = 0; i < m; ++i) {
      if (th[i + 1] == th[i]) continue;
      const double v = inst.values[i];
      if (!(v - th[i + 1] * eps > 0.0)) return;
      chain *= (v - th[i] * eps) / (v - th[i + 1] * eps);
    }
    StackelbergCdf cdf{inst, th, 1.0 / chain};
    if (!(cdf.f_zero > 0.0) || cdf.f_zero > 1.0 + 1e-12) return;
    double prev = 0.0;
    for (int k = 0; k < n; ++k) {
      const double fk = std::min(1.0, stackelberg_cdf_at(cdf, k));
      if (fk < prev - 1e-12) return;
      alpha.probs[k] = std::max(0.0, fk - prev);
      prev = std::max(prev, fk);
    }
    double s = 0.0;
    for (double x : alpha.probs) s += x;
    for (double& x : alpha.probs) x /= s;
    PureStrategy f{std::vector<int>(th.begin(), th.end() - 1)};
    if (!is_best_response(g, alpha, f)) return;
    const double val = expected_utilities(g, alpha, f).opt;
    best.solution.per_strategy_values.emplace_back(PureStrategy{th}, val);
    if (!found || val > best.solution.value + 1e-12) {
      found = true;
      best.solution.value = val;
      best.solution.alpha = alpha;
      best.solution.best_response = f;
      best.cdf = cdf;
    }
  };
  auto rec = [&](auto&& self, int i, int lo) -> void {
    if (i == m + 1) {
      consider();
      return;
    }
    for (int b = lo; b <= top; ++b) {
      th[i] = b;
      self(self, i + 1, b);
    }
  };
  th[0] = 0;
  rec(rec, 1, 0);
  if (!found) throw GridError("characterization: no valid threshold vector on this grid");
  verify_equilibrium(g, best.solution);
  return best;
}

}  // namespace arena
