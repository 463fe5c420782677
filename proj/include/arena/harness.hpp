#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "arena/error.hpp"
#include "arena/fpa.hpp"
#include "arena/game.hpp"
#include "arena/io.hpp"
#include "arena/learners.hpp"
#include "arena/optimizers.hpp"
#include "arena/regret.hpp"
#include "arena/rng.hpp"
#include "arena/scripted_examples.hpp"
#include "arena/stackelberg.hpp"
#include "arena/swap_learners.hpp"
#include "arena/trace.hpp"

namespace arena {

enum class ScenarioKind { StandardRobustness, BayesianExploit, PolytopeCap, Example61, Example62, StackelbergOnly };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::StandardRobustness: return "fpa_standard_robustness";
    case ScenarioKind::BayesianExploit: return "fpa_bayesian_exploit";
    case ScenarioKind::PolytopeCap: return "polytope_cap";
    case ScenarioKind::Example61: return "example_6_1";
    case ScenarioKind::Example62: return "example_6_2";
    case ScenarioKind::StackelbergOnly: return "stackelberg_only";
  }
  return "?";
}

inline ScenarioKind parse_scenario_kind(const std::string& s, const std::string& path) {
  for (auto k : {ScenarioKind::StandardRobustness, ScenarioKind::BayesianExploit, ScenarioKind::PolytopeCap,
                 ScenarioKind::Example61, ScenarioKind::Example62, ScenarioKind::StackelbergOnly})
    if (s == to_string(k)) return k;
  throw ConfigError(path + ": unknown scenario kind '" + s + "'");
}

struct OptimizerSpec {
  std::string kind = "static";  // static | sequence | exploit | ascending
  std::vector<double> alpha;
  std::vector<int> bids;
  std::optional<double> gamma;
  double gamma_scale = 1.0;  // gamma = gamma_scale / sqrt(T) when gamma is absent

  double gamma_for(long T) const { return gamma ? *gamma : gamma_scale / std::sqrt(static_cast<double>(T)); }
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::StackelbergOnly;
  json raw;
  std::uint64_t hash = 0;
  std::vector<FpaInstance> instances;  // one per m for separation instances
  std::optional<BayesianGame> game;    // stackelberg_only on a general game
  LearnerSpec learner;
  CoverKind learner_cover = CoverKind::MonotoneCapped;  // polytope_swap learner
  OptimizerSpec optimizer;
  CoverKind cover = CoverKind::Monotone;  // Stackelberg benchmark
  bool prune = true;
  std::string method = "lp";  // lp | characterization | both
  long horizon = 0;
  std::vector<std::uint64_t> seeds;
  double p1 = -1.0;  // example_6_1; negative selects 1/T
  std::string out = "out";
  bool write_trace = true;
  std::optional<bool> profiles;  // default: only when T * N * C <= kProfileBudget
  int plot_points = 1000;
  std::filesystem::path base_dir;  // for relative file references

  std::string hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
  }
};

inline constexpr double kProfileBudget = 2e6;

namespace detail {

inline std::vector<int> read_bid_file(const std::filesystem::path& p, const std::string& path) {
  std::ifstream in(p);
  if (!in) throw ConfigError(path + ": cannot open " + p.string());
  std::vector<int> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(first, last - first + 1);
    if (lineno == 1 && tok == "bid") continue;
    out.push_back(static_cast<int>(parse_long(tok, lineno)));
  }
  return out;
}

inline std::vector<FpaInstance> parse_instances(const json& j, const std::string& path) {
  const auto type = field<std::string>(j, "type", path);
  try {
    if (type == "standard") {
      return {standard_fpa(field<double>(j, "epsilon", path), field<int>(j, "n_bids", path),
                           field_or<double>(j, "v_opt", 1.0, path), field<double>(j, "v_learner", path))};
    }
    if (type == "separation") {
      const json& mj = require(j, "m", path);
      std::vector<int> ms = mj.is_array() ? get_as<std::vector<int>>(mj, path + ".m") : std::vector<int>{get_as<int>(mj, path + ".m")};
      if (ms.empty()) throw ConfigError(path + ".m: empty list");
      const double eps = field_or<double>(j, "epsilon", 1.0 / 16, path);
      std::vector<FpaInstance> out;
      for (int m : ms) {
        if (m < 2 || m > 12) throw ConfigError(path + ".m: values must lie in [2, 12]");
        const int n = field_or<int>(j, "n_bids", static_cast<int>(std::lround(std::ldexp(1.0, m) / eps)) + 1, path);
        out.push_back(separation_instance(m, BidGrid(eps, n)));
      }
      return out;
    }
    if (type == "fpa") return {fpa_from_json(j, path)};
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".type: unknown instance type '" + type + "'");
}

inline OptimizerSpec parse_optimizer(const json& j, const std::filesystem::path& base, const std::string& path) {
  OptimizerSpec o;
  o.kind = field<std::string>(j, "kind", path);
  if (o.kind == "static") {
    o.alpha = field<std::vector<double>>(j, "alpha", path);
  } else if (o.kind == "sequence") {
    if (j.contains("bids")) o.bids = field<std::vector<int>>(j, "bids", path);
    else o.bids = read_bid_file(base / field<std::string>(j, "file", path), path + ".file");
  } else if (o.kind == "exploit" || o.kind == "ascending") {
    if (j.contains("gamma")) o.gamma = field<double>(j, "gamma", path);
    o.gamma_scale = field_or<double>(j, "gamma_scale", 1.0, path);
  } else {
    throw ConfigError(path + ".kind: unknown optimizer kind '" + o.kind + "'");
  }
  return o;
}

}  // namespace detail

// Parses and validates a scenario; every module precondition is checked before any run starts.
inline ScenarioConfig parse_scenario(const json& j, const std::filesystem::path& base_dir = ".") {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("config: expected an object");
  ScenarioConfig cfg;
  cfg.raw = j;
  cfg.raw.erase("out");
  cfg.hash = fnv1a64(cfg.raw.dump());
  cfg.base_dir = base_dir;
  cfg.kind = parse_scenario_kind(field<std::string>(j, "kind", "config"), "config.kind");
  cfg.out = field_or<std::string>(j, "out", "out", "config");
  cfg.seeds = field_or<std::vector<std::uint64_t>>(j, "seeds", {0}, "config");
  if (cfg.seeds.empty()) throw ConfigError("config.seeds: empty list");
  if (j.contains("output")) {
    const auto& o = j["output"];
    cfg.write_trace = field_or<bool>(o, "trace", true, "config.output");
    if (o.contains("profiles")) cfg.profiles = field<bool>(o, "profiles", "config.output");
    cfg.plot_points = field_or<int>(o, "plot_points", 1000, "config.output");
    if (cfg.plot_points < 2) throw ConfigError("config.output.plot_points: must be >= 2");
  }
  if (j.contains("cover")) {
    try {
      cfg.cover = parse_cover_kind(field<std::string>(j, "cover", "config"));
    } catch (const InputError& e) {
      throw ConfigError(std::string("config.cover: ") + e.what());
    }
  }
  cfg.prune = field_or<bool>(j, "prune", true, "config");

  if (cfg.kind != ScenarioKind::StackelbergOnly) {
    cfg.horizon = field<long>(j, "T", "config");
    if (cfg.horizon < 1) throw ConfigError("config.T: must be positive");
  }

  if (cfg.kind == ScenarioKind::Example61 || cfg.kind == ScenarioKind::Example62) {
    cfg.p1 = field_or<double>(j, "p1", -1.0, "config");
    try {
      if (cfg.kind == ScenarioKind::Example61) example_6_1(cfg.horizon, cfg.p1 < 0 ? 1.0 / cfg.horizon : cfg.p1);
      else example_6_2(cfg.horizon);
    } catch (const InputError& e) {
      throw ConfigError(std::string("config.T: ") + e.what());
    }
    return cfg;
  }

  if (cfg.kind == ScenarioKind::StackelbergOnly) {
    cfg.method = field_or<std::string>(j, "method", "lp", "config");
    if (cfg.method != "lp" && cfg.method != "characterization" && cfg.method != "both")
      throw ConfigError("config.method: expected lp, characterization or both");
    if (j.contains("game")) {
      cfg.game = game_from_json(j["game"], "config.game");
      if (cfg.method != "lp") throw ConfigError("config.method: characterization needs an FPA instance");
    } else {
      cfg.instances = parse_instances(require(j, "instance", "config"), "config.instance");
    }
    return cfg;
  }

  cfg.instances = parse_instances(require(j, "instance", "config"), "config.instance");
  if (cfg.kind == ScenarioKind::StandardRobustness && cfg.instances.front().m() != 1)
    throw ConfigError("config.instance: robustness scenarios need a single-context FPA");

  const json& lj = require(j, "learner", "config");
  cfg.learner.kind = field<std::string>(lj, "kind", "config.learner");
  cfg.learner.eta = field_or<double>(lj, "eta", 0.0, "config.learner");
  if (cfg.kind == ScenarioKind::PolytopeCap) {
    if (cfg.learner.kind != "polytope_swap") throw ConfigError("config.learner.kind: polytope_cap needs polytope_swap");
    try {
      cfg.learner_cover = parse_cover_kind(field_or<std::string>(lj, "cover", "monotone_capped", "config.learner"));
    } catch (const InputError& e) {
      throw ConfigError(std::string("config.learner.cover: ") + e.what());
    }
  } else if (cfg.learner.kind != "hedge" && cfg.learner.kind != "ftl" && cfg.learner.kind != "eps_greedy") {
    throw ConfigError("config.learner.kind: unknown learner kind '" + cfg.learner.kind + "'");
  }

  cfg.optimizer = parse_optimizer(require(j, "optimizer", "config"), base_dir, "config.optimizer");
  for (const auto& inst : cfg.instances) {
    const int n = inst.grid.n_bids;
    const auto& o = cfg.optimizer;
    try {
      if (o.kind == "static") {
        if (static_cast<int>(o.alpha.size()) != n) throw ConfigError("config.optimizer.alpha: length must equal n_bids");
        check_probability_vector(o.alpha, "config.optimizer.alpha");
      } else if (o.kind == "sequence") {
        if (static_cast<long>(o.bids.size()) != cfg.horizon)
          throw ConfigError("config.optimizer: sequence length " + std::to_string(o.bids.size()) + " differs from T");
        for (int b : o.bids)
          if (b < 0 || b >= n) throw ConfigError("config.optimizer: bid index off the grid");
      } else if (o.kind == "exploit") {
        const double gamma = o.gamma_for(cfg.horizon);
        if (!(2.0 * gamma / inst.grid.epsilon < 1.0)) throw ConfigError("config.optimizer.gamma: 2 gamma / eps must be below 1");
        if (std::abs(inst.v_opt - 1.0) > 1e-12 || !inst.grid.index_of(1.0))
          throw ConfigError("config.optimizer: exploit needs v_opt = 1 on the grid");
      } else if (o.kind == "ascending") {
        if (!(2.0 * o.gamma_for(cfg.horizon) / inst.grid.epsilon < 1.0))
          throw ConfigError("config.optimizer.gamma: 2 gamma / eps must be below 1");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
  }
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  const auto j = read_json_file(path);
  return parse_scenario(j, std::filesystem::path(path).parent_path());
}

struct SeedRun {
  std::string label;
  int m = 0;
  std::uint64_t seed = 0;
  long horizon = 0;
  double opt_total = 0.0;  // expected over the learner's mixtures and contexts
  double opt_realized = 0.0;
  double learner_total = 0.0;
  double V = 0.0;
  double external = 0.0;
  std::optional<double> swap;
  std::optional<double> polytope_swap;        // exact LP value
  std::optional<double> polytope_swap_upper;  // cover-distribution upper bound
  std::optional<double> regret_bound;
  double max_stationary_residual = 0.0;
  std::string trace_file, plot_file;

  double per_round() const { return opt_total / static_cast<double>(horizon); }
  double ratio() const { return V > 0.0 ? opt_total / (V * horizon) : std::nan(""); }
};

struct RunResult {
  std::string config_hash;
  ScenarioKind kind = ScenarioKind::StackelbergOnly;
  std::vector<SeedRun> runs;
  std::map<int, StackelbergSolution> benchmarks;  // keyed by m
  json extra;                                      // kind-specific fields merged into the summary
  double wall_clock = 0.0;
};

struct GapRow {
  int m = 0;
  std::size_t seeds = 0;
  double mean_per_round = 0.0;
  double stderr_per_round = 0.0;
  double V = 0.0;
  double ratio = 0.0;
  double ratio_stderr = 0.0;
};

// Per-m mean optimizer utility per round against V, across seeds.
inline std::vector<GapRow> gap_report(const RunResult& r, const std::vector<int>& required = {}) {
  std::map<int, std::vector<const SeedRun*>> by_m;
  for (const auto& s : r.runs) by_m[s.m].push_back(&s);
  for (int m : required)
    if (!by_m.count(m)) throw ParameterError("gap report: no runs for m = " + std::to_string(m));
  if (by_m.empty()) throw ParameterError("gap report: no runs");
  std::vector<GapRow> rows;
  for (const auto& [m, list] : by_m) {
    GapRow row;
    row.m = m;
    row.seeds = list.size();
    row.V = list.front()->V;
    double s = 0.0, s2 = 0.0;
    for (const auto* x : list) s += x->per_round();
    row.mean_per_round = s / list.size();
    for (const auto* x : list) s2 += (x->per_round() - row.mean_per_round) * (x->per_round() - row.mean_per_round);
    row.stderr_per_round = list.size() > 1 ? std::sqrt(s2 / (list.size() - 1) / list.size()) : 0.0;
    row.ratio = row.mean_per_round / row.V;
    row.ratio_stderr = row.stderr_per_round / row.V;
    rows.push_back(row);
  }
  return rows;
}

namespace detail {

inline StackelbergSolution benchmark(const FpaInstance& inst, const ScenarioConfig& cfg) {
  return stackelberg_solve_fpa(inst, cfg.cover, cfg.prune);
}

inline std::vector<int> optimizer_sequence(const ScenarioConfig& cfg, const FpaInstance& inst,
                                           const StackelbergSolution& bench) {
  const auto& o = cfg.optimizer;
  const long T = cfg.horizon;
  if (o.kind == "sequence") return o.bids;
  if (o.kind == "exploit") return exploit_sequence(inst, o.gamma_for(T), T).bids;
  // ascending: a zero-bid prefix of ceil(2 gamma / eps * T), then the Stackelberg mixture in ascending bid order
  const long zeros = count_ceil(2.0 * o.gamma_for(T) / inst.grid.epsilon * T);
  return ascending_schedule(bench.alpha, T, zeros);
}

struct PlotWriter {
  long stride = 1;
  long horizon = 0;
  double V = 0.0;
  double cum = 0.0;
  std::ostringstream os;

  PlotWriter(long T, double v, int points) : stride(std::max(1L, (T + points - 1) / points)), horizon(T), V(v) {
    os << "round,cumulative_optimizer_utility,stackelberg_reference\n";
  }
  void add(long t, double u) {
    cum += u;
    if (t % stride == 0 || t == horizon || t == 1)
      os << t << ',' << format_double(cum) << ',' << format_double(V * static_cast<double>(t)) << '\n';
  }
};

inline SeedRun run_seed(const ScenarioConfig& cfg, const FpaInstance& inst, const StackelbergSolution& bench,
                        const std::vector<int>* sequence, std::uint64_t seed, std::size_t instance_index,
                        const std::filesystem::path& out_dir) {
  const auto g = build_fpa(inst);
  const long T = cfg.horizon;
  SeedRun run;
  run.m = inst.m();
  run.seed = seed;
  run.horizon = T;
  run.V = bench.value;
  run.label = cfg.kind == ScenarioKind::StandardRobustness ? "v" + format_double(inst.values[0]) : "m" + std::to_string(inst.m());

  std::unique_ptr<Learner> learner;
  PolytopeSwapLearner* swap_learner = nullptr;
  std::optional<CoverSpec> learner_cover;
  if (cfg.kind == ScenarioKind::PolytopeCap) {
    learner_cover = fpa_cover(cfg.learner_cover, inst);
    auto p = std::make_unique<PolytopeSwapLearner>(g, *learner_cover, T, cfg.learner.eta);
    swap_learner = p.get();
    learner = std::move(p);
  } else {
    learner = make_learner(cfg.learner, g, T);
  }

  OptimizerPolicy policy = cfg.optimizer.kind == "static" ? OptimizerPolicy::static_mixed(OptimizerMixed{cfg.optimizer.alpha})
                                                          : OptimizerPolicy::oblivious(*sequence);

  RegretAccumulator acc(g);
  std::optional<CoverSwapAccumulator> cover_acc;
  if (swap_learner) cover_acc.emplace(g, swap_learner->cover());
  PlotWriter plot(T, bench.value, cfg.plot_points);
  SimulationOptions so;
  so.keep_trace = cfg.write_trace;
  so.keep_profiles = cfg.write_trace && cfg.profiles.value_or(static_cast<double>(T) * g.n_actions() * g.n_contexts() <= kProfileBudget);
  so.on_round = [&](const TraceRecord& rec, const Learner& l) {
    acc.add(rec.opt_action, l.profile());
    if (cover_acc) cover_acc->add(rec.opt_action, swap_learner->distribution());
    plot.add(rec.round, round_utilities(g, rec.opt_action, l.profile()).opt);
  };
  const CounterRng rng(cfg.hash ^ mix64(instance_index + 1), seed);
  auto res = simulate(g, policy, *learner, T, rng, so);

  run.opt_total = res.opt_expected;
  run.opt_realized = res.opt_realized;
  run.learner_total = res.learner_expected;
  run.external = acc.external();
  if (g.n_contexts() == 1) run.swap = acc.swap();
  if (cover_acc) {
    run.polytope_swap_upper = cover_acc->value();
    const double n = static_cast<double>(learner_cover->size());
    run.regret_bound = 3.0 * g.utility_bound() * std::sqrt(n * std::log(n) * T);
    run.max_stationary_residual = swap_learner->bank().max_residual();
  }
  if (so.keep_profiles && count_pure_strategies(g.n_actions(), g.n_contexts()) <= kMaxPolytopeStrategies &&
      g.n_contexts() > 1)
    run.polytope_swap = polytope_swap_regret(res.trace, g, full_cover(g.n_actions(), g.n_contexts())).value;

  const std::string stem = run.label + "_seed" + std::to_string(seed);
  run.plot_file = "plot_" + stem + ".csv";
  write_text_file((out_dir / run.plot_file).string(), plot.os.str());
  if (cfg.write_trace) {
    run.trace_file = "trace_" + stem + ".csv";
    std::ostringstream os;
    write_trace_csv(os, res.trace);
    write_text_file((out_dir / run.trace_file).string(), os.str());
  }
  return run;
}

// Runs jobs on up to `jobs` threads; the first exception is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const int k = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (k == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < k; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

inline json seed_run_json(const SeedRun& s) {
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  json j = {{"label", s.label},
            {"m", s.m},
            {"seed", s.seed},
            {"optimizer_total", s.opt_total},
            {"optimizer_per_round", s.per_round()},
            {"optimizer_realized", s.opt_realized},
            {"learner_total", s.learner_total},
            {"V", s.V},
            {"ratio", s.V > 0.0 ? json(s.ratio()) : json(nullptr)},
            {"external_regret", s.external},
            {"swap_regret", opt(s.swap)},
            {"polytope_swap_regret", opt(s.polytope_swap)},
            {"plot_file", s.plot_file},
            {"trace_file", s.trace_file.empty() ? json(nullptr) : json(s.trace_file)}};
  if (s.polytope_swap_upper) {
    j["polytope_swap_regret_upper"] = *s.polytope_swap_upper;
    j["regret_bound"] = *s.regret_bound;
    j["max_stationary_residual"] = s.max_stationary_residual;
  }
  return j;
}

}  // namespace detail

inline json summary_json(const RunResult& r) {
  json j = r.extra.is_object() ? r.extra : json::object();
  j["config_hash"] = r.config_hash;
  j["kind"] = to_string(r.kind);
  if (!r.runs.empty()) {
    json runs = json::array();
    for (const auto& s : r.runs) runs.push_back(detail::seed_run_json(s));
    j["runs"] = runs;
  }
  if (!r.benchmarks.empty()) {
    json b = json::object();
    for (const auto& [m, sol] : r.benchmarks) {
      json s = to_json(sol);
      s.erase("per_strategy_values");
      b["m" + std::to_string(m)] = s;
    }
    j["benchmarks"] = b;
  }
  if (r.kind == ScenarioKind::BayesianExploit && !r.runs.empty()) {
    json rows = json::array();
    for (const auto& g : gap_report(r))
      rows.push_back({{"m", g.m}, {"seeds", g.seeds}, {"mean_per_round", g.mean_per_round},
                      {"stderr", g.stderr_per_round}, {"V", g.V}, {"ratio", g.ratio}, {"ratio_stderr", g.ratio_stderr}});
    j["gap_report"] = rows;
  }
  j["wall_clock_seconds"] = r.wall_clock;
  return j;
}

// Executes a validated scenario and writes summary.json, trace and plot CSVs into out_dir.
inline RunResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, int jobs = 1) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);
  RunResult result;
  result.config_hash = cfg.hash_hex();
  result.kind = cfg.kind;

  switch (cfg.kind) {
    case ScenarioKind::Example61:
    case ScenarioKind::Example62: {
      const auto ex = cfg.kind == ScenarioKind::Example61
                          ? example_6_1(cfg.horizon, cfg.p1 < 0 ? 1.0 / cfg.horizon : cfg.p1)
                          : example_6_2(cfg.horizon);
      const auto sim = run_scripted(ex, cfg.hash, cfg.seeds.front());
      const auto rep = regret_report(sim.trace, ex.game);
      result.extra = to_json(rep);
      result.extra["T"] = cfg.horizon;
      result.extra["learner_total"] = sim.learner_expected;
      result.extra["optimizer_total"] = sim.opt_expected;
      if (cfg.kind == ScenarioKind::Example61) result.extra["p1"] = ex.game.prior(0);
      write_text_file((out_dir / "game.json").string(), to_json(ex.game).dump(2) + "\n");
      std::ostringstream os;
      write_trace_csv(os, sim.trace);
      write_text_file((out_dir / "trace.csv").string(), os.str());
      break;
    }
    case ScenarioKind::StackelbergOnly: {
      if (cfg.game) {
        const auto sol = stackelberg_solve(*cfg.game, full_cover(cfg.game->n_actions(), cfg.game->n_contexts()));
        result.extra = to_json(sol);
        break;
      }
      const auto& inst = cfg.instances.front();
      std::optional<StackelbergSolution> lp;
      std::optional<CharacterizedSolution> ch;
      if (cfg.method != "characterization") lp = detail::benchmark(inst, cfg);
      if (cfg.method != "lp") ch = fpa_stackelberg_characterized(inst);
      result.extra = to_json(lp ? *lp : ch->solution);
      result.extra["method"] = cfg.method;
      result.extra["instance"] = to_json(inst);
      if (ch) {
        json c = to_json(ch->solution);
        c.erase("per_strategy_values");
        c["thresholds"] = ch->cdf.thresholds;
        c["f_zero"] = ch->cdf.f_zero;
        if (lp) {
          const double tol = 2.0 * inst.grid.epsilon * build_fpa(inst).utility_bound();
          result.extra["characterization"] = c;
          result.extra["gap"] = std::abs(lp->value - ch->solution.value);
          result.extra["agreement_tolerance"] = tol;
        } else {
          result.extra["thresholds"] = ch->cdf.thresholds;
          result.extra["f_zero"] = ch->cdf.f_zero;
        }
      }
      break;
    }
    default: {
      std::vector<StackelbergSolution> bench(cfg.instances.size());
      std::vector<std::vector<int>> seqs(cfg.instances.size());
      detail::parallel_for(cfg.instances.size(), jobs, [&](std::size_t k) {
        bench[k] = detail::benchmark(cfg.instances[k], cfg);
        if (cfg.optimizer.kind != "static") seqs[k] = detail::optimizer_sequence(cfg, cfg.instances[k], bench[k]);
      });
      for (std::size_t k = 0; k < cfg.instances.size(); ++k) result.benchmarks[cfg.instances[k].m()] = bench[k];
      const std::size_t S = cfg.seeds.size();
      result.runs.resize(cfg.instances.size() * S);
      detail::parallel_for(result.runs.size(), jobs, [&](std::size_t idx) {
        const std::size_t k = idx / S;
        result.runs[idx] = detail::run_seed(cfg, cfg.instances[k], bench[k], &seqs[k], cfg.seeds[idx % S], k, out_dir);
      });
      result.extra["T"] = cfg.horizon;
      if (cfg.kind != ScenarioKind::StandardRobustness) {
        json g = json::array();
        for (std::size_t k = 0; k < cfg.instances.size(); ++k)
          g.push_back(cfg.optimizer.kind == "exploit" || cfg.optimizer.kind == "ascending" ? json(cfg.optimizer.gamma_for(cfg.horizon)) : json(nullptr));
        result.extra["gamma"] = g;
      }
    }
  }
  result.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text_file((out_dir / "summary.json").string(), summary_json(result).dump(2) + "\n");
  return result;
}

}  // namespace arena
