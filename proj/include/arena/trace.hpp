#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "arena/error.hpp"
#include "arena/game.hpp"

namespace arena {

struct TraceRecord {
  long round = 0;  // 1-based
  int opt_action = 0;
  int context = 0;
  int learner_action = 0;
  double u_opt = 0.0;  // realized
  double u_learner = 0.0;
  BehavioralProfile profile;  // empty when the run does not keep profiles
};

struct Trace {
  int n_actions = 0;
  int n_contexts = 0;
  std::vector<TraceRecord> records;

  long size() const { return static_cast<long>(records.size()); }
  bool has_profiles() const { return !records.empty() && records.front().profile.n_actions() > 0; }
};

inline void require_profiles(const Trace& trace, const char* who) {
  for (const auto& r : trace.records)
    if (r.profile.n_actions() == 0) throw DomainError(std::string(who) + ": trace has no learner profiles");
}

inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

// One row per round; the profile column lists N*C probabilities context-major, ';'-separated.
inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "round,opt_action,context,learner_action,u_opt,u_learner,profile\n";
  for (const auto& r : trace.records) {
    os << r.round << ',' << r.opt_action << ',' << r.context << ',' << r.learner_action << ','
       << format_double(r.u_opt) << ',' << format_double(r.u_learner) << ',';
    const auto& d = r.profile.data();
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (k) os << ';';
      os << format_double(d[k]);
    }
    os << '\n';
  }
}

namespace detail {

inline double parse_double(const std::string& s, long line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("trace csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s, long line) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("trace csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

inline Trace read_trace_csv(std::istream& is, const BayesianGame& game) {
  Trace trace;
  trace.n_actions = game.n_actions();
  trace.n_contexts = game.n_contexts();
  std::string line;
  long lineno = 0;
  if (!std::getline(is, line)) throw ConfigError("trace csv: empty input");
  ++lineno;
  if (line.rfind("round,opt_action,context,learner_action", 0) != 0)
    throw ConfigError("trace csv: unexpected header");
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = detail::split(line, ',');
    if (f.size() != 7) throw ConfigError("trace csv line " + std::to_string(lineno) + ": expected 7 fields");
    TraceRecord r;
    r.round = detail::parse_long(f[0], lineno);
    r.opt_action = static_cast<int>(detail::parse_long(f[1], lineno));
    r.context = static_cast<int>(detail::parse_long(f[2], lineno));
    r.learner_action = static_cast<int>(detail::parse_long(f[3], lineno));
    r.u_opt = detail::parse_double(f[4], lineno);
    r.u_learner = detail::parse_double(f[5], lineno);
    if (r.opt_action < 0 || r.opt_action >= game.m_actions() || r.context < 0 ||
        r.context >= game.n_contexts() || r.learner_action < 0 || r.learner_action >= game.n_actions())
      throw ConfigError("trace csv line " + std::to_string(lineno) + ": index out of range for game");
    if (!f[6].empty()) {
      auto p = detail::split(f[6], ';');
      if (static_cast<int>(p.size()) != game.n_actions() * game.n_contexts())
        throw ConfigError("trace csv line " + std::to_string(lineno) + ": profile has wrong length");
      r.profile = BehavioralProfile(game.n_actions(), game.n_contexts());
      for (std::size_t k = 0; k < p.size(); ++k) r.profile.data()[k] = detail::parse_double(p[k], lineno);
    }
    trace.records.push_back(std::move(r));
  }
  return trace;
}

}  // namespace arena
