#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arena/error.hpp"
#include "arena/fpa.hpp"
#include "arena/game.hpp"
#include "arena/learners.hpp"
#include "arena/rng.hpp"
#include "arena/trace.hpp"

namespace arena {

namespace detail {

// Integer part of a nonnegative count that should be integral up to rounding noise.
inline long count_floor(double x) { return static_cast<long>(std::floor(x + 1e-7)); }
inline long count_ceil(double x) { return static_cast<long>(std::ceil(x - 1e-7)); }

}  // namespace detail

struct ExploitPlan {
  FpaInstance instance;
  double gamma = 0.0;
  double gamma_prime = 0.0;
  long horizon = 0;
  std::vector<std::vector<long>> phase_counts;  // phase -> grid index -> count
  std::vector<long> phase_lengths;
  std::vector<int> bids;  // grid indices, length horizon

  long phase_start(int i) const {
    long s = 0;
    for (int k = 0; k < i; ++k) s += phase_lengths[k];
    return s;
  }
};

// Phase 0 bids zero for ceil(g' T) rounds, g' = 2 gamma / eps. Phase i >= 1 holds
// floor(R (F_i(x) - F_{i-1}(x))) bids at most x, R = T - ceil(g' T), emitted in ascending order.
// The rounding shortfall becomes zero bids at the start of phase 1.
inline ExploitPlan exploit_sequence(const FpaInstance& inst, double gamma, long T) {
  inst.validate();
  if (T < 1) throw ParameterError("exploit sequence: horizon must be positive");
  if (!(gamma >= 0.0)) throw ParameterError("exploit sequence: gamma must be >= 0");
  if (std::abs(inst.v_opt - 1.0) > 1e-12) throw ParameterError("exploit sequence: optimizer value must be 1");
  const int top = inst.grid.index_checked(1.0, "bid 1");
  const int m = inst.m();
  if (!(inst.values[0] > inst.v_opt)) throw GridError("exploit sequence: learner values must exceed the optimizer value");

  ExploitPlan plan;
  plan.instance = inst;
  plan.gamma = gamma;
  plan.gamma_prime = 2.0 * gamma / inst.grid.epsilon;
  plan.horizon = T;
  if (plan.gamma_prime >= 1.0) throw ParameterError("exploit sequence: 2 gamma / eps must be below 1");

  const long zeros = detail::count_ceil(plan.gamma_prime * T);
  const long rest = T - zeros;
  const int n = inst.grid.n_bids;
  plan.phase_counts.assign(m + 1, std::vector<long>(n, 0));
  plan.phase_counts[0][0] = zeros;
  plan.phase_lengths.assign(m + 1, 0);
  plan.phase_lengths[0] = zeros;
  long used = zeros;
  for (int i = 1; i <= m; ++i) {
    long prev = 0;
    for (int k = 0; k <= top; ++k) {
      const double x = inst.grid.bid(k);
      const long cum = detail::count_floor(rest * (phase_cdf(inst, i, x) - phase_cdf(inst, i - 1, x)));
      if (cum < prev) throw NumericError("exploit sequence: phase mass decreases on the grid");
      plan.phase_counts[i][k] = cum - prev;
      prev = cum;
    }
    plan.phase_lengths[i] = prev;
    used += prev;
  }
  if (used > T) throw NumericError("exploit sequence: phase counts exceed the horizon");
  plan.phase_counts[1][0] += T - used;
  plan.phase_lengths[1] += T - used;

  plan.bids.reserve(T);
  for (int i = 0; i <= m; ++i)
    for (int k = 0; k < n; ++k) plan.bids.insert(plan.bids.end(), plan.phase_counts[i][k], k);
  return plan;
}

// Leading zeros, then the remaining rounds split by the floors of the cumulative mass of alpha,
// in ascending action order.
inline std::vector<int> ascending_schedule(const OptimizerMixed& alpha, long T, long leading_zeros) {
  if (leading_zeros < 0 || leading_zeros > T) throw ParameterError("ascending schedule: bad zero prefix");
  check_probability_vector(alpha.probs, "ascending schedule mixture");
  const long rest = T - leading_zeros;
  std::vector<int> out(leading_zeros, 0);
  double cum = 0.0;
  long prev = 0;
  for (int k = 0; k < alpha.size(); ++k) {
    cum += alpha.probs[k];
    const long c = k + 1 == alpha.size() ? rest : std::min(rest, detail::count_floor(rest * cum));
    out.insert(out.end(), std::max(0L, c - prev), k);
    prev = std::max(prev, c);
  }
  return out;
}

struct ObliviousTransform {
  double gamma = 0.0;
  double gamma_hat = 0.0;
  long horizon = 0;       // T, length of the input
  long zeros = 0;         // ceil(gamma_hat T)
  std::vector<int> input;
  std::vector<int> min_mean_based;  // min(X_t) per input round
  std::vector<int> output;          // length zeros + T
};

// Sigma rows of a single-context learner facing the bid sequence, one row after each round.
namespace detail {

template <class Visit>
void replay_sigma(const BayesianGame& g, const std::vector<int>& bids, Visit visit) {
  CumulativeRewards sigma(g.n_actions(), 1);
  const RewardTable table(g);
  for (std::size_t t = 0; t < bids.size(); ++t) {
    sigma.add(table[bids[t]]);
    visit(static_cast<long>(t), sigma.row(0));
  }
}

}  // namespace detail

inline ObliviousTransform obliviousify(const std::vector<int>& bids, const FpaInstance& inst, double gamma) {
  inst.validate();
  if (inst.m() != 1) throw DomainError("obliviousify needs a standard (single-value) FPA");
  const double eps = inst.grid.epsilon;
  if (!(gamma < eps)) throw ParameterError("obliviousify: gamma must be below eps");
  if (!(gamma > 0.0)) throw ParameterError("obliviousify: gamma must be positive");
  const auto g = build_fpa(inst);
  for (int b : bids)
    if (b < 0 || b >= inst.grid.n_bids) throw GridError("obliviousify: bid index off the grid");

  ObliviousTransform tr;
  tr.gamma = gamma;
  tr.gamma_hat = 3.0 * gamma / (eps - gamma);
  if (!(tr.gamma_hat > 2.0 * gamma / (eps - gamma))) throw ParameterError("obliviousify: gamma_hat precondition fails");
  tr.horizon = static_cast<long>(bids.size());
  tr.zeros = detail::count_ceil(tr.gamma_hat * tr.horizon);
  tr.input = bids;
  tr.output.assign(tr.zeros, 0);
  const double thr = gamma * tr.horizon;
  const int vo = inst.grid.floor_index(inst.v_opt);
  detail::replay_sigma(g, bids, [&](long t, std::span<const double> row) {
    const int lo = mean_based_set(row, thr).front();
    tr.min_mean_based.push_back(lo);
    const int b = bids[t];
    tr.output.push_back(lo < b && b <= vo ? b : 0);
  });
  return tr;
}

struct ObliviousClaimReport {
  long checked = 0;
  long violations = 0;
  long first_violation = -1;  // 1-based input round
};

// max(Xhat_{t + zeros}) <= min(X_t), with Xhat for a learner of horizon zeros + T.
inline ObliviousClaimReport check_oblivious_claim(const ObliviousTransform& tr, const FpaInstance& inst) {
  const auto g = build_fpa(inst);
  const double thr_hat = tr.gamma * static_cast<double>(tr.zeros + tr.horizon);
  ObliviousClaimReport rep;
  detail::replay_sigma(g, tr.output, [&](long s, std::span<const double> row) {
    if (s < tr.zeros) return;
    const long t = s - tr.zeros;
    const int hi = mean_based_set(row, thr_hat).back();
    ++rep.checked;
    if (hi > tr.min_mean_based[t]) {
      if (rep.violations++ == 0) rep.first_violation = t + 1;
    }
  });
  return rep;
}

struct OptimizerPolicy {
  enum class Kind { StaticMixed, Sequence, Adaptive };
  using Callback = std::function<int(long round, const std::vector<TraceRecord>& history)>;

  Kind kind = Kind::StaticMixed;
  OptimizerMixed alpha;
  std::vector<int> sequence;
  Callback callback;

  static OptimizerPolicy static_mixed(OptimizerMixed a) { return {Kind::StaticMixed, std::move(a), {}, {}}; }
  static OptimizerPolicy oblivious(std::vector<int> bids) { return {Kind::Sequence, {}, std::move(bids), {}}; }
  static OptimizerPolicy adaptive(Callback cb) { return {Kind::Adaptive, {}, {}, std::move(cb)}; }
};

struct SimulationOptions {
  bool keep_trace = true;
  bool keep_profiles = true;
  // Called after each round with the completed record and the learner state before its update.
  std::function<void(const TraceRecord&, const Learner&)> on_round;
};

struct SimulationResult {
  Trace trace;
  double opt_expected = 0.0;  // sum over rounds of u_O(i_t, beta_t) in expectation over contexts
  double opt_realized = 0.0;
  double learner_expected = 0.0;
  long rounds = 0;
};

inline SimulationResult simulate(const BayesianGame& g, const OptimizerPolicy& policy, Learner& learner, long T,
                                 const CounterRng& rng, const SimulationOptions& opt = {}) {
  if (T < 1) throw ParameterError("simulate: horizon must be positive");
  if (learner.profile().n_actions() != g.n_actions() || learner.profile().n_contexts() != g.n_contexts())
    throw ShapeError("simulate: learner shape differs from game");
  if (policy.kind == OptimizerPolicy::Kind::StaticMixed) check_alpha(g, policy.alpha);
  if (policy.kind == OptimizerPolicy::Kind::Sequence) {
    if (static_cast<long>(policy.sequence.size()) != T)
      throw ParameterError("simulate: sequence length " + std::to_string(policy.sequence.size()) +
                           " differs from horizon " + std::to_string(T));
    for (int i : policy.sequence)
      if (i < 0 || i >= g.m_actions()) throw ShapeError("simulate: sequence action out of range");
  }
  if (policy.kind == OptimizerPolicy::Kind::Adaptive && !policy.callback)
    throw ParameterError("simulate: adaptive policy without callback");

  SimulationResult res;
  res.trace.n_actions = g.n_actions();
  res.trace.n_contexts = g.n_contexts();
  if (opt.keep_trace) res.trace.records.reserve(T);
  const RewardTable table(g);
  for (long t = 1; t <= T; ++t) {
    int i = 0;
    switch (policy.kind) {
      case OptimizerPolicy::Kind::StaticMixed:
        i = sample_index(policy.alpha.probs, rng.uniform(t, CounterRng::kOptimizer));
        break;
      case OptimizerPolicy::Kind::Sequence:
        i = policy.sequence[t - 1];
        break;
      case OptimizerPolicy::Kind::Adaptive:
        i = policy.callback(t, res.trace.records);
        if (i < 0 || i >= g.m_actions()) throw ShapeError("simulate: adaptive policy returned an invalid action");
        break;
    }
    const int c = sample_index(g.prior(), rng.uniform(t, CounterRng::kContext));
    const auto step = learner_step(learner, c, rng.uniform(t, CounterRng::kLearner));
    TraceRecord rec;
    rec.round = t;
    rec.opt_action = i;
    rec.context = c;
    rec.learner_action = step.action;
    rec.u_opt = g.u_opt(i, step.action, c);
    rec.u_learner = g.u_learner(i, step.action, c);
    const auto exp = round_utilities(g, i, learner.profile());
    res.opt_expected += exp.opt;
    res.learner_expected += exp.learner;
    res.opt_realized += rec.u_opt;
    if (opt.keep_profiles) rec.profile = learner.profile();
    if (opt.on_round) opt.on_round(rec, learner);
    if (opt.keep_trace) res.trace.records.push_back(std::move(rec));
    learner.observe(table[i]);
  }
  res.rounds = T;
  return res;
}

}  // namespace arena
