#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/error.hpp"
#include "arena/fpa.hpp"
#include "arena/game.hpp"
#include "arena/regret.hpp"
#include "arena/stackelberg.hpp"

namespace arena {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing");
  return *it;
}

template <class T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + ": wrong type");
  }
}

template <class T>
T field(const json& j, const std::string& key, const std::string& path) {
  return get_as<T>(require(j, key, path), path + "." + key);
}

template <class T>
T field_or(const json& j, const std::string& key, T fallback, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  auto it = j.find(key);
  return it == j.end() ? fallback : get_as<T>(*it, path + "." + key);
}

}  // namespace detail

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

inline json to_json(const BayesianGame& g) {
  json uo = json::array(), ul = json::array();
  for (int i = 0; i < g.m_actions(); ++i) {
    json ro = json::array(), rl = json::array();
    for (int j = 0; j < g.n_actions(); ++j) {
      json co = json::array(), cl = json::array();
      for (int c = 0; c < g.n_contexts(); ++c) {
        co.push_back(g.u_opt(i, j, c));
        cl.push_back(g.u_learner(i, j, c));
      }
      ro.push_back(std::move(co));
      rl.push_back(std::move(cl));
    }
    uo.push_back(std::move(ro));
    ul.push_back(std::move(rl));
  }
  return {{"m", g.m_actions()}, {"n", g.n_actions()}, {"c", g.n_contexts()},
          {"prior", g.prior()}, {"u_opt", uo},       {"u_learner", ul}};
}

inline BayesianGame game_from_json(const json& j, const std::string& path = "game") {
  const int m = detail::field<int>(j, "m", path), n = detail::field<int>(j, "n", path), c = detail::field<int>(j, "c", path);
  if (m < 1 || n < 1 || c < 1) throw ConfigError(path + ": m, n, c must be positive");
  auto prior = detail::field<std::vector<double>>(j, "prior", path);
  auto tensor = [&](const char* key) {
    const auto t = detail::field<std::vector<std::vector<std::vector<double>>>>(j, key, path);
    if (static_cast<int>(t.size()) != m) throw ConfigError(path + "." + key + ": first dimension must be m");
    std::vector<double> flat;
    for (const auto& a : t) {
      if (static_cast<int>(a.size()) != n) throw ConfigError(path + "." + key + ": second dimension must be n");
      for (const auto& b : a) {
        if (static_cast<int>(b.size()) != c) throw ConfigError(path + "." + key + ": third dimension must be c");
        flat.insert(flat.end(), b.begin(), b.end());
      }
    }
    return flat;
  };
  try {
    return BayesianGame(m, n, c, std::move(prior), tensor("u_opt"), tensor("u_learner"));
  } catch (const InputError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline json to_json(const FpaInstance& inst) {
  return {{"epsilon", inst.grid.epsilon}, {"n_bids", inst.grid.n_bids}, {"v_opt", inst.v_opt},
          {"values", inst.values},       {"probs", inst.probs}};
}

inline FpaInstance fpa_from_json(const json& j, const std::string& path = "instance") {
  FpaInstance inst;
  try {
    inst.grid = BidGrid(detail::field<double>(j, "epsilon", path), detail::field<int>(j, "n_bids", path));
    inst.v_opt = detail::field<double>(j, "v_opt", path);
    inst.values = detail::field<std::vector<double>>(j, "values", path);
    inst.probs = detail::field<std::vector<double>>(j, "probs", path);
    inst.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return inst;
}

inline json to_json(const PureStrategy& f) { return f.choices; }

inline json to_json(const StrategyDistribution& d) {
  json out = json::array();
  for (const auto& [f, w] : d.support) out.push_back({{"strategy", f.choices}, {"prob", w}});
  return out;
}

inline json to_json(const StackelbergSolution& s) {
  json per = json::array();
  for (const auto& [f, v] : s.per_strategy_values)
    per.push_back({{"strategy", f.choices}, {"value", v ? json(*v) : json(nullptr)}});
  return {{"V", s.value}, {"alpha", s.alpha.probs}, {"best_response", s.best_response.choices},
          {"per_strategy_values", per}};
}

inline json to_json(const PolytopeCertificate& c) {
  json groups = json::array();
  for (const auto& g : c.groups)
    groups.push_back({{"opt_action", g.opt_action}, {"rounds", g.weight}, {"profile", g.profile.data()},
                      {"rho", to_json(g.rho)}});
  json dev = json::array();
  for (const auto& [f, h] : c.deviation) dev.push_back({{"from", f.choices}, {"to", h.choices}});
  return {{"groups", groups}, {"deviation", dev}, {"objective", c.objective}};
}

inline json to_json(const RegretReport& r) {
  json out = {{"external_regret", r.external}};
  out["swap_regret"] = r.swap ? json(*r.swap) : json(nullptr);
  out["polytope_swap_regret"] = r.polytope_swap ? json(*r.polytope_swap) : json(nullptr);
  if (r.certificate) out["certificate"] = to_json(*r.certificate);
  return out;
}

}  // namespace arena
