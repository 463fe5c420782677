#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "arena/arena.hpp"

namespace {

using namespace arena;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

int cmd_run(const std::string& config, const std::string& out, int jobs) {
  auto cfg = load_scenario(config);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path(cfg.out) : std::filesystem::path(out);
  const auto res = run_scenario(cfg, dir, jobs);
  std::cerr << to_string(cfg.kind) << ": wrote " << (dir / "summary.json").string() << " (" << res.runs.size()
            << " runs, " << res.wall_clock << " s)\n";
  if (cfg.kind == ScenarioKind::BayesianExploit)
    for (const auto& g : gap_report(res))
      std::cerr << "  m=" << g.m << "  U/T=" << g.mean_per_round << " +- " << g.stderr_per_round << "  V=" << g.V
                << "  ratio=" << g.ratio << '\n';
  return 0;
}

int cmd_stackelberg(const std::string& input, const std::string& cover, const std::string& method, bool no_prune,
                    const std::string& out) {
  const auto j = read_json_file(input);
  json cfg = {{"kind", "stackelberg_only"}, {"cover", cover}, {"method", method}, {"prune", !no_prune}};
  if (j.contains("u_opt")) {
    cfg["game"] = j;
  } else {
    json inst = j;
    if (!inst.contains("type")) inst["type"] = "fpa";
    cfg["instance"] = inst;
  }
  const auto sc = parse_scenario(cfg);
  json result;
  if (sc.game) {
    const auto full = full_cover(sc.game->n_actions(), sc.game->n_contexts());
    result = to_json(stackelberg_solve(*sc.game, full));
  } else {
    const auto tmp = std::filesystem::temp_directory_path() / ("arena-stackelberg-" + sc.hash_hex());
    auto res = run_scenario(sc, tmp, 1);
    std::filesystem::remove_all(tmp);
    result = res.extra;
  }
  emit(result, out);
  return 0;
}

int cmd_examples(const std::string& which, long T, double p1, const std::string& out) {
  json cfg = {{"kind", which == "6.1" ? "example_6_1" : "example_6_2"}, {"T", T}};
  if (which != "6.1" && which != "6.2") throw ConfigError("--which: expected 6.1 or 6.2");
  if (which == "6.1" && p1 >= 0.0) cfg["p1"] = p1;
  const auto sc = parse_scenario(cfg);
  const auto res = run_scenario(sc, out, 1);
  auto rep = res.extra;
  for (const char* k : {"T", "learner_total", "optimizer_total", "p1"}) rep.erase(k);
  write_text_file((std::filesystem::path(out) / "regret.json").string(), rep.dump(2) + "\n");
  std::cout << rep.dump(2) << '\n';
  return 0;
}

int cmd_regret(const std::string& trace_path, const std::string& game_path, const std::string& cover,
               const std::string& out) {
  const auto g = game_from_json(read_json_file(game_path));
  std::ifstream in(trace_path);
  if (!in) throw ConfigError("cannot open " + trace_path);
  const auto trace = read_trace_csv(in, g);
  require_profiles(trace, "regret");
  RegretReport rep;
  if (cover.empty()) {
    rep = regret_report(trace, g);
  } else {
    const auto kind = parse_cover_kind(cover);
    CoverSpec c = kind == CoverKind::Full ? full_cover(g.n_actions(), g.n_contexts())
                                          : enumerate_monotone_maps(g.n_contexts(), g.n_actions());
    rep = regret_report(trace, g, &c);
  }
  emit(to_json(rep), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated Bayesian game simulator: learners, optimizers, regret meters and Stackelberg benchmarks"};
  app.require_subcommand(1);

  std::string config, out, input, cover = "monotone", method = "lp", which, trace, game, regret_cover;
  int jobs = 1;
  bool no_prune = false;
  long T = 600;
  double p1 = -1.0;

  auto* run = app.add_subcommand("run", "Run a scenario config and write summary, trace and plot files");
  run->add_option("config", config, "Scenario JSON")->required();
  run->add_option("--out", out, "Output directory (overrides the config)");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* st = app.add_subcommand("stackelberg", "Solve the Stackelberg benchmark of a game or FPA instance");
  st->add_option("input", input, "Game JSON (m, n, c, prior, u_opt, u_learner) or FPA instance JSON")->required();
  st->add_option("--cover", cover, "Learner cover for FPA instances")
      ->check(CLI::IsMember({"full", "monotone", "monotone_capped"}));
  st->add_option("--method", method, "Solver")->check(CLI::IsMember({"lp", "characterization", "both"}));
  st->add_flag("--no-prune", no_prune, "Keep optimizer bids above v_O and learner bids above v_O + eps");
  st->add_option("--out", out, "Output file (default stdout)");

  auto* ex = app.add_subcommand("examples", "Emit game JSON, trace CSV and regret report for a scripted example");
  ex->add_option("--which", which, "Example")->required()->check(CLI::IsMember({"6.1", "6.2"}));
  ex->add_option("--T", T, "Horizon");
  ex->add_option("--p1", p1, "Probability of the negligible context (default 1/T)");
  std::string ex_out = "examples_out";
  ex->add_option("--out", ex_out, "Output directory")->capture_default_str();

  auto* rg = app.add_subcommand("regret", "Regret report for a stored trace");
  rg->add_option("trace", trace, "Trace CSV")->required();
  rg->add_option("game", game, "Game JSON")->required();
  rg->add_option("--cover", regret_cover, "Cover for polytope swap regret (default: full)")
      ->check(CLI::IsMember({"full", "monotone"}));
  rg->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out, jobs);
    if (*st) return cmd_stackelberg(input, cover, method, no_prune, out);
    if (*ex) return cmd_examples(which, T, p1, ex_out);
    if (*rg) return cmd_regret(trace, game, regret_cover, out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const HorizonError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
