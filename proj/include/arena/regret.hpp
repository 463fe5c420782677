#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "arena/error.hpp"
#include "arena/game.hpp"
#include "arena/lp.hpp"
#include "arena/swap_learners.hpp"
#include "arena/trace.hpp"

namespace arena {

// Running sums that determine external and swap regret: per optimizer action, the count of
// rounds and the summed learner profile.
class RegretAccumulator {
 public:
  explicit RegretAccumulator(const BayesianGame& g)
      : g_(&g), count_(g.m_actions(), 0.0),
        mass_(static_cast<std::size_t>(g.m_actions()) * g.n_actions() * g.n_contexts(), 0.0) {}

  void add(int i, const BehavioralProfile& beta) {
    count_[i] += 1.0;
    const auto& d = beta.data();
    double* w = mass_.data() + static_cast<std::size_t>(i) * d.size();
    for (std::size_t k = 0; k < d.size(); ++k) w[k] += d[k];
  }

  double learner_total() const {
    const auto& g = *g_;
    double s = 0.0;
    for (int i = 0; i < g.m_actions(); ++i)
      for (int c = 0; c < g.n_contexts(); ++c)
        for (int j = 0; j < g.n_actions(); ++j) s += g.prior(c) * mass(i, j, c) * g.u_learner(i, j, c);
    return s;
  }

  // Best fixed pure strategy in hindsight minus earned; the max splits per context.
  double external() const {
    const auto& g = *g_;
    double best = 0.0;
    for (int c = 0; c < g.n_contexts(); ++c) {
      double mx = -INFINITY;
      for (int j = 0; j < g.n_actions(); ++j) {
        double s = 0.0;
        for (int i = 0; i < g.m_actions(); ++i) s += count_[i] * g.u_learner(i, j, c);
        mx = std::max(mx, s);
      }
      best += g.prior(c) * mx;
    }
    return best - learner_total();
  }

  // sum_j max_k sum_t beta_t(j) (u(i_t, k) - u(i_t, j)); defined for single-context games.
  double swap() const {
    const auto& g = *g_;
    if (g.n_contexts() != 1) throw DomainError("swap regret needs a single-context game");
    double total = 0.0;
    for (int j = 0; j < g.n_actions(); ++j) {
      double best = 0.0;  // k = j
      for (int k = 0; k < g.n_actions(); ++k) {
        double s = 0.0;
        for (int i = 0; i < g.m_actions(); ++i) s += mass(i, j, 0) * (g.u_learner(i, k, 0) - g.u_learner(i, j, 0));
        best = std::max(best, s);
      }
      total += best;
    }
    return total;
  }

 private:
  double mass(int i, int j, int c) const {
    return mass_[(static_cast<std::size_t>(i) * g_->n_contexts() + c) * g_->n_actions() + j];
  }

  const BayesianGame* g_;
  std::vector<double> count_;
  std::vector<double> mass_;  // [i][c][j]
};

inline RegretAccumulator accumulate(const Trace& trace, const BayesianGame& g) {
  require_profiles(trace, "regret meter");
  RegretAccumulator acc(g);
  for (const auto& r : trace.records) {
    check_profile(g, r.profile);
    acc.add(r.opt_action, r.profile);
  }
  return acc;
}

inline double external_regret(const Trace& trace, const BayesianGame& g) { return accumulate(trace, g).external(); }

inline double swap_regret(const Trace& trace, const BayesianGame& g) {
  if (g.n_contexts() != 1) throw DomainError("swap regret needs a single-context game");
  return accumulate(trace, g).swap();
}

// Swap regret of the meta-game whose actions are the cover's strategies, measured on the
// learner's own distributions over the cover. Those distributions decompose the played profiles,
// so for a best-response cover this bounds polytope swap regret from above.
class CoverSwapAccumulator {
 public:
  CoverSwapAccumulator(const BayesianGame& g, const CoverSpec& cover)
      : g_(&g), cover_(&cover), n_(static_cast<int>(cover.size())), mass_(static_cast<std::size_t>(n_) * g.m_actions(), 0.0) {}

  void add(int i, std::span<const double> dist) {
    if (static_cast<int>(dist.size()) != n_) throw ShapeError("cover distribution has wrong length");
    for (int f = 0; f < n_; ++f) mass_[static_cast<std::size_t>(f) * g_->m_actions() + i] += dist[f];
  }

  double value() const {
    const auto& g = *g_;
    const int m = g.m_actions();
    // meta[i * n + h] = sum_c p_c u_L(i, h(c), c)
    std::vector<double> meta(static_cast<std::size_t>(m) * n_);
    for (int i = 0; i < m; ++i)
      for (int h = 0; h < n_; ++h) {
        double s = 0.0;
        for (int c = 0; c < g.n_contexts(); ++c) s += g.prior(c) * g.u_learner(i, cover_->strategies[h](c), c);
        meta[static_cast<std::size_t>(i) * n_ + h] = s;
      }
    double total = 0.0;
    std::vector<double> gain(n_);
    for (int f = 0; f < n_; ++f) {
      const double* w = mass_.data() + static_cast<std::size_t>(f) * m;
      std::fill(gain.begin(), gain.end(), 0.0);
      double base = 0.0;
      for (int i = 0; i < m; ++i) {
        if (w[i] == 0.0) continue;
        const double* row = meta.data() + static_cast<std::size_t>(i) * n_;
        base += w[i] * row[f];
        for (int h = 0; h < n_; ++h) gain[h] += w[i] * row[h];
      }
      total += *std::max_element(gain.begin(), gain.end()) - base;
    }
    return total;
  }

 private:
  const BayesianGame* g_;
  const CoverSpec* cover_;
  int n_;
  std::vector<double> mass_;  // [f][i]
};

struct PolytopeCertificate {
  struct Group {
    int opt_action = 0;
    double weight = 0.0;  // number of rounds
    BehavioralProfile profile;
    StrategyDistribution rho;
  };
  std::vector<Group> groups;
  std::vector<std::pair<PureStrategy, PureStrategy>> deviation;  // f -> pi(f) in the cover
  double objective = 0.0;  // LP value: sum_f z_f minus the learner's utility
};

struct PolytopeResult {
  double value = 0.0;
  PolytopeCertificate certificate;
};

inline constexpr std::int64_t kMaxPolytopeStrategies = 4096;

namespace detail {

inline double pure_meta_utility(const BayesianGame& g, int i, const PureStrategy& f) {
  double s = 0.0;
  for (int c = 0; c < g.n_contexts(); ++c) s += g.prior(c) * g.u_learner(i, f(c), c);
  return s;
}

inline double profile_utility(const BayesianGame& g, int i, const BehavioralProfile& b) {
  return round_utilities(g, i, b).learner;
}

struct GroupKey {
  int i;
  std::vector<double> profile;
  bool operator<(const GroupKey& o) const {
    if (i != o.i) return i < o.i;
    return std::lexicographical_compare(profile.begin(), profile.end(), o.profile.begin(), o.profile.end(),
                                        [](double a, double b) {
                                          std::uint64_t x, y;
                                          std::memcpy(&x, &a, 8);
                                          std::memcpy(&y, &b, 8);
                                          return x < y;
                                        });
  }
};

// Pure strategies whose every choice has positive probability in the profile, lexicographic.
inline std::vector<PureStrategy> supported_strategies(const BehavioralProfile& b) {
  std::vector<std::vector<int>> supp(b.n_contexts());
  for (int c = 0; c < b.n_contexts(); ++c)
    for (int j = 0; j < b.n_actions(); ++j)
      if (b(j, c) > 0.0) supp[c].push_back(j);
  std::vector<PureStrategy> out;
  std::vector<int> cur(b.n_contexts());
  auto rec = [&](auto&& self, int c) -> void {
    if (c == b.n_contexts()) {
      out.push_back(PureStrategy{cur});
      return;
    }
    for (int j : supp[c]) {
      cur[c] = j;
      self(self, c + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace detail

// Recomputes the certificate's objective from its decompositions and deviation map alone.
inline double audit_certificate(const PolytopeCertificate& cert, const BayesianGame& g) {
  std::map<PureStrategy, PureStrategy> pi(cert.deviation.begin(), cert.deviation.end());
  double total = 0.0;
  for (const auto& grp : cert.groups) {
    total -= grp.weight * detail::profile_utility(g, grp.opt_action, grp.profile);
    for (const auto& [f, w] : grp.rho.support) {
      auto it = pi.find(f);
      if (it == pi.end()) throw NumericError("certificate: strategy without a deviation");
      total += grp.weight * w * detail::pure_meta_utility(g, grp.opt_action, it->second);
    }
  }
  return total;
}

// Exact polytope swap regret against deviation set S by one LP over per-group decompositions.
inline PolytopeResult polytope_swap_regret(const Trace& trace, const BayesianGame& g, const CoverSpec& cover,
                                           const LpOptions& lp_opt = {}) {
  require_profiles(trace, "polytope swap regret");
  if (count_pure_strategies(g.n_actions(), g.n_contexts()) > kMaxPolytopeStrategies)
    throw DomainError("polytope swap regret: N^C exceeds 4096");
  if (cover.strategies.empty()) throw DomainError("polytope swap regret: empty deviation set");
  for (const auto& h : cover.strategies) check_strategy(g, h);

  std::map<detail::GroupKey, double> grouped;
  for (const auto& r : trace.records) {
    check_profile(g, r.profile);
    grouped[detail::GroupKey{r.opt_action, r.profile.data()}] += 1.0;
  }

  struct GroupVars {
    int i;
    double w;
    BehavioralProfile profile;
    std::vector<PureStrategy> fs;
    std::vector<int> var;
  };
  std::vector<GroupVars> groups;
  LinearProgram lp;
  std::map<PureStrategy, int> z_of;
  for (const auto& [key, w] : grouped) {
    GroupVars gv{key.i, w, BehavioralProfile(g.n_actions(), g.n_contexts()), {}, {}};
    gv.profile.data() = key.profile;
    gv.fs = detail::supported_strategies(gv.profile);
    for (const auto& f : gv.fs) {
      gv.var.push_back(lp.add_var(0.0));
      if (!z_of.count(f)) z_of[f] = -1;
    }
    groups.push_back(std::move(gv));
  }
  for (auto& [f, z] : z_of) z = lp.add_var(-1.0, true);

  for (const auto& gv : groups)
    for (int c = 0; c < g.n_contexts(); ++c) {
      // every context's rows sum to the same total mass, so one row per later context is implied
      int skip = -1;
      if (c > 0)
        for (int j = 0; j < g.n_actions(); ++j)
          if (gv.profile(j, c) > 0.0) skip = j;
      for (int j = 0; j < g.n_actions(); ++j) {
        if (gv.profile(j, c) <= 0.0 || j == skip) continue;
        std::vector<std::pair<int, double>> terms;
        for (std::size_t k = 0; k < gv.fs.size(); ++k)
          if (gv.fs[k](c) == j) terms.emplace_back(gv.var[k], 1.0);
        lp.add_row(std::move(terms), Sense::Equal, gv.profile(j, c));
      }
    }

  // z_f >= sum_g w_g rho_{g,f} u(i_g, h) for every h in S
  std::map<PureStrategy, std::vector<std::pair<int, int>>> uses;  // f -> (group, var)
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    for (std::size_t k = 0; k < groups[gi].fs.size(); ++k) uses[groups[gi].fs[k]].emplace_back(static_cast<int>(gi), groups[gi].var[k]);
  for (const auto& [f, list] : uses)
    for (const auto& h : cover.strategies) {
      std::vector<std::pair<int, double>> terms{{z_of[f], 1.0}};
      for (const auto& [gi, v] : list) {
        const double coef = groups[gi].w * detail::pure_meta_utility(g, groups[gi].i, h);
        if (coef != 0.0) terms.emplace_back(v, -coef);
      }
      lp.add_row(std::move(terms), Sense::GreaterEq, 0.0);
    }

  const auto sol = lp_solve(lp, lp_opt);
  if (sol.status != LpStatus::Optimal)
    throw NumericError(std::string("polytope swap regret LP reported ") + to_string(sol.status));

  double baseline = 0.0;
  for (const auto& gv : groups) baseline += gv.w * detail::profile_utility(g, gv.i, gv.profile);

  PolytopeResult res;
  res.value = -sol.objective - baseline;
  auto& cert = res.certificate;
  cert.objective = res.value;
  for (const auto& gv : groups) {
    PolytopeCertificate::Group cg{gv.i, gv.w, gv.profile, {}};
    for (std::size_t k = 0; k < gv.fs.size(); ++k) {
      const double x = sol.x[gv.var[k]];
      if (x > 0.0) cg.rho.support.emplace_back(gv.fs[k], x);
    }
    cert.groups.push_back(std::move(cg));
  }
  for (const auto& [f, list] : uses) {
    double best = -INFINITY;
    const PureStrategy* arg = nullptr;
    for (const auto& h : cover.strategies) {
      double s = 0.0;
      for (const auto& [gi, v] : list) s += groups[gi].w * sol.x[v] * detail::pure_meta_utility(g, groups[gi].i, h);
      if (s > best + 1e-12) {
        best = s;
        arg = &h;
      }
    }
    cert.deviation.emplace_back(f, *arg);
  }
  return res;
}

// Repairs a reference decomposition so its marginals match beta, moving little mass.
inline StrategyDistribution construct_rho(const BehavioralProfile& beta, const StrategyDistribution& reference) {
  const int n = beta.n_actions(), cn = beta.n_contexts();
  const std::int64_t total = count_pure_strategies(n, cn);
  if (static_cast<double>(total) > kMaxCoverSize) throw DomainError("construct_rho: strategy space too large");

  std::unordered_map<std::int64_t, double> ref;
  for (const auto& [f, w] : reference.support) {
    if (f.n_contexts() != cn) throw ShapeError("construct_rho: reference has wrong context count");
    for (int a : f.choices)
      if (a < 0 || a >= n) throw ShapeError("construct_rho: reference action out of range");
    ref[strategy_index(f, n)] += w;
  }

  BehavioralProfile run(n, cn);  // marginals of the phase-one mass
  std::vector<char> saturated(static_cast<std::size_t>(n) * cn, 0);
  auto sat = [&](int j, int c) -> char& { return saturated[static_cast<std::size_t>(c) * n + j]; };
  std::vector<double> rho1(total, 0.0);
  PureStrategy f{std::vector<int>(cn)};
  for (std::int64_t k = 0; k < total; ++k) {
    f = strategy_from_index(k, n, cn);
    bool active = true;
    double cap = 1.0;
    for (int c = 0; c < cn && active; ++c) {
      if (!(beta(f(c), c) > 0.0) || sat(f(c), c)) active = false;
      cap = std::min(cap, beta(f(c), c) - run(f(c), c));
    }
    if (!active) continue;
    auto it = ref.find(k);
    const double x = std::max(0.0, std::min(it == ref.end() ? 0.0 : it->second, cap));
    rho1[k] = x;
    for (int c = 0; c < cn; ++c) {
      double& r = run(f(c), c);
      r += x;
      if (beta(f(c), c) - r <= 1e-15 * std::max(1.0, beta(f(c), c))) {
        r = beta(f(c), c);
        sat(f(c), c) = 1;
      }
    }
  }

  double mass1 = 0.0;
  for (double x : rho1) mass1 += x;
  const double deficit = 1.0 - mass1;

  StrategyDistribution out;
  std::vector<double> rho2(static_cast<std::size_t>(n) * cn, 0.0);
  bool fill = deficit > 0.0;
  if (fill) {
    for (int c = 0; c < cn; ++c)
      for (int j = 0; j < n; ++j) rho2[static_cast<std::size_t>(c) * n + j] = std::max(0.0, beta(j, c) - run(j, c));
  }
  const double denom = fill ? std::pow(deficit, cn - 1) : 1.0;
  for (std::int64_t k = 0; k < total; ++k) {
    double x = rho1[k];
    if (fill) {
      f = strategy_from_index(k, n, cn);
      double prod = 1.0;
      for (int c = 0; c < cn && prod != 0.0; ++c) prod *= rho2[static_cast<std::size_t>(c) * n + f(c)];
      if (prod != 0.0) x += prod / denom;
    }
    if (x > 0.0) out.support.emplace_back(strategy_from_index(k, n, cn), x);
  }
  return out;
}

struct RegretReport {
  double external = 0.0;
  std::optional<double> swap;
  std::optional<double> polytope_swap;
  std::optional<PolytopeCertificate> certificate;
};

inline RegretReport regret_report(const Trace& trace, const BayesianGame& g, const CoverSpec* cover = nullptr) {
  RegretReport rep;
  const auto acc = accumulate(trace, g);
  rep.external = acc.external();
  if (g.n_contexts() == 1) rep.swap = acc.swap();
  if (count_pure_strategies(g.n_actions(), g.n_contexts()) <= kMaxPolytopeStrategies) {
    CoverSpec full;
    if (!cover) full = full_cover(g.n_actions(), g.n_contexts());
    auto res = polytope_swap_regret(trace, g, cover ? *cover : full);
    rep.polytope_swap = res.value;
    rep.certificate = std::move(res.certificate);
  }
  return rep;
}

}  // namespace arena
