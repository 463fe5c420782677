#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "arena/error.hpp"

namespace arena {

enum class Sense { LessEq, GreaterEq, Equal };

// maximize objective . x subject to sparse rows; variables are >= 0 unless marked free.
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, double>> terms;
    Sense sense = Sense::LessEq;
    double rhs = 0.0;
  };

  std::vector<double> objective;
  std::vector<bool> is_free;
  std::vector<Row> rows;

  int n_vars() const { return static_cast<int>(objective.size()); }

  int add_var(double obj = 0.0, bool free_var = false) {
    objective.push_back(obj);
    is_free.push_back(free_var);
    return n_vars() - 1;
  }
  void add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs) {
    rows.push_back({std::move(terms), sense, rhs});
  }

  void validate() const {
    if (is_free.size() != objective.size()) throw ShapeError("lp: free flags differ from variable count");
    for (double c : objective)
      if (!std::isfinite(c)) throw DomainError("lp: non-finite objective coefficient");
    for (const auto& r : rows) {
      if (!std::isfinite(r.rhs)) throw DomainError("lp: non-finite right-hand side");
      for (const auto& [k, a] : r.terms) {
        if (k < 0 || k >= n_vars()) throw ShapeError("lp: term references unknown variable");
        if (!std::isfinite(a)) throw DomainError("lp: non-finite coefficient");
      }
    }
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  long pivots = 0;
};

enum class PivotRule {
  Bland,
  // Largest reduced cost, dropping to Bland after a run of degenerate pivots.
  DantzigThenBland,
};

struct LpOptions {
  double pivot_tol = 1e-10;
  double feas_tol = 1e-9;
  PivotRule rule = PivotRule::Bland;
  long max_pivots = 0;  // 0: derived from problem size
};

namespace detail {

inline constexpr double kDriveOutTol = 1e-7;

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows + 1) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double* row(int r) { return a_.data() + static_cast<std::size_t>(r) * (cols_ + 1); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  // Row rows_ holds reduced costs (enter when > 0) and minus the objective value in its rhs slot.
  void pivot(int pr, int pc) {
    double* prow = row(pr);
    const double inv = 1.0 / prow[pc];
    for (int c = 0; c <= cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* rr = row(r);
      const double f = rr[pc];
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) rr[c] -= f * prow[c];
      rr[pc] = 0.0;
    }
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

struct SimplexRun {
  Tableau& t;
  std::vector<int>& basis;
  const std::vector<char>& blocked;  // columns never allowed to enter
  const LpOptions& opt;
  long& pivots;
  long max_pivots;

  // Returns false if unbounded.
  bool run() {
    const int obj = t.rows();
    bool bland = opt.rule == PivotRule::Bland;
    int degenerate_run = 0;
    for (;;) {
      int pc = -1;
      double best = opt.pivot_tol;
      for (int c = 0; c < t.cols(); ++c) {
        if (blocked[c]) continue;
        const double d = t.at(obj, c);
        if (d > best) {
          pc = c;
          if (bland) break;
          best = d;
        }
      }
      if (pc < 0) return true;
      // Two-pass ratio test: find the tightest ratio with a small slack, then take the largest pivot
      // among rows that fit under it so round-off sized entries are never pivoted on.
      double bound = std::numeric_limits<double>::infinity();
      for (int r = 0; r < t.rows(); ++r) {
        const double a = t.at(r, pc);
        if (a > opt.pivot_tol) bound = std::min(bound, (std::max(t.rhs(r), 0.0) + opt.feas_tol) / a);
      }
      double piv = 0.0;
      for (int r = 0; r < t.rows(); ++r) {
        const double a = t.at(r, pc);
        if (a > opt.pivot_tol && std::max(t.rhs(r), 0.0) / a <= bound) piv = std::max(piv, a);
      }
      // Bland picks the lowest basic index among pivots within a factor of the largest
      int pr = -1;
      double ratio = 0.0;
      for (int r = 0; r < t.rows(); ++r) {
        const double a = t.at(r, pc);
        if (a <= opt.pivot_tol || std::max(t.rhs(r), 0.0) / a > bound) continue;
        const bool ok = bland ? a >= 1e-2 * piv && (pr < 0 || basis[r] < basis[pr]) : a == piv && pr < 0;
        if (ok) {
          pr = r;
          ratio = std::max(t.rhs(r), 0.0) / a;
        }
      }
      if (pr < 0) return false;
      if (ratio <= 1e-12) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
      }
      t.pivot(pr, pc);
      basis[pr] = pc;
      if (++pivots > max_pivots) {
        std::ostringstream os;
        os << "simplex stalled after " << pivots << " pivots (" << t.rows() << " rows, " << t.cols()
           << " columns, max |entry| " << t.max_abs() << ")";
        throw NumericError(os.str());
      }
    }
  }
};

}  // namespace detail

inline LpResult lp_solve(const LinearProgram& lp, const LpOptions& opt = {}) {
  lp.validate();
  const int n = lp.n_vars();
  const int m = static_cast<int>(lp.rows.size());

  // Structural columns: each variable, plus a negative copy for free variables.
  std::vector<int> neg_col(n, -1);
  int cols = n;
  for (int k = 0; k < n; ++k)
    if (lp.is_free[k]) neg_col[k] = cols++;

  std::vector<double> sign(m, 1.0);
  std::vector<Sense> sense(m);
  int n_slack = 0, n_art = 0;
  for (int r = 0; r < m; ++r) {
    sense[r] = lp.rows[r].sense;
    if (lp.rows[r].rhs < 0.0) {
      sign[r] = -1.0;
      if (sense[r] == Sense::LessEq)
        sense[r] = Sense::GreaterEq;
      else if (sense[r] == Sense::GreaterEq)
        sense[r] = Sense::LessEq;
    }
    if (sense[r] != Sense::Equal) ++n_slack;
    if (sense[r] != Sense::LessEq) ++n_art;
  }
  const int slack0 = cols, art0 = cols + n_slack, total = cols + n_slack + n_art;

  detail::Tableau t(m, total);
  std::vector<int> basis(m, -1);
  std::vector<char> is_art(total, 0);
  int s = slack0, a = art0;
  for (int r = 0; r < m; ++r) {
    for (const auto& [k, v] : lp.rows[r].terms) {
      t.at(r, k) += sign[r] * v;
      if (neg_col[k] >= 0) t.at(r, neg_col[k]) -= sign[r] * v;
    }
    t.rhs(r) = sign[r] * lp.rows[r].rhs;
    if (sense[r] == Sense::LessEq) {
      t.at(r, s) = 1.0;
      basis[r] = s++;
    } else {
      if (sense[r] == Sense::GreaterEq) t.at(r, s++) = -1.0;
      t.at(r, a) = 1.0;
      is_art[a] = 1;
      basis[r] = a++;
    }
  }

  LpResult res;
  const long max_pivots = opt.max_pivots > 0 ? opt.max_pivots : 200L * (m + total) + 10000;
  std::vector<char> blocked(total, 0);

  // Phase 1: maximize -sum(artificials).
  if (n_art > 0) {
    for (int r = 0; r < m; ++r) {
      if (!is_art[basis[r]]) continue;
      for (int c = 0; c <= total; ++c)
        if (!is_art[c] || c == total) t.at(m, c) += t.at(r, c);
    }
    detail::SimplexRun{t, basis, blocked, opt, res.pivots, max_pivots}.run();
    double infeas = 0.0;
    for (int r = 0; r < m; ++r)
      if (is_art[basis[r]]) infeas += t.rhs(r);
    double scale = 1.0;
    for (const auto& row : lp.rows) scale = std::max(scale, std::abs(row.rhs));
    if (infeas > opt.feas_tol * scale) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Drive zero-level artificials out of the basis; rows with no pivot are redundant.
    for (int r = 0; r < m; ++r) {
      if (!is_art[basis[r]]) continue;
      int pc = -1;
      double best = detail::kDriveOutTol;
      for (int c = 0; c < total; ++c)
        if (!is_art[c] && std::abs(t.at(r, c)) > best) {
          best = std::abs(t.at(r, c));
          pc = c;
        }
      if (pc >= 0) {
        t.pivot(r, pc);
        basis[r] = pc;
      } else {
        for (int c = 0; c <= total; ++c) t.at(r, c) = 0.0;
        t.at(r, basis[r]) = 1.0;
      }
    }
    for (int c = 0; c < total; ++c) blocked[c] = is_art[c];
  }

  // Phase 2 reduced costs.
  std::vector<double> cost(total, 0.0);
  for (int k = 0; k < n; ++k) {
    cost[k] = lp.objective[k];
    if (neg_col[k] >= 0) cost[neg_col[k]] = -lp.objective[k];
  }
  for (int c = 0; c <= total; ++c) t.at(m, c) = c < total ? cost[c] : 0.0;
  for (int r = 0; r < m; ++r) {
    const double cb = cost[basis[r]];
    if (cb == 0.0) continue;
    for (int c = 0; c <= total; ++c) t.at(m, c) -= cb * t.at(r, c);
  }
  for (int c = 0; c < total; ++c)
    if (blocked[c]) t.at(m, c) = 0.0;

  if (!detail::SimplexRun{t, basis, blocked, opt, res.pivots, max_pivots}.run()) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  std::vector<double> col_val(total, 0.0);
  for (int r = 0; r < m; ++r) col_val[basis[r]] = std::max(0.0, t.rhs(r));
  res.x.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    res.x[k] = col_val[k];
    if (neg_col[k] >= 0) res.x[k] -= col_val[neg_col[k]];
  }
  res.status = LpStatus::Optimal;
  res.objective = 0.0;
  for (int k = 0; k < n; ++k) res.objective += lp.objective[k] * res.x[k];

  for (int r = 0; r < m; ++r) {
    const auto& row = lp.rows[r];
    double lhs = 0.0, mag = std::abs(row.rhs);
    for (const auto& [k, v] : row.terms) {
      lhs += v * res.x[k];
      mag = std::max(mag, std::abs(v * res.x[k]));
    }
    const double tol = opt.feas_tol * std::max(1.0, mag);
    const bool bad = (row.sense == Sense::LessEq && lhs > row.rhs + tol) ||
                     (row.sense == Sense::GreaterEq && lhs < row.rhs - tol) ||
                     (row.sense == Sense::Equal && std::abs(lhs - row.rhs) > tol);
    if (bad) {
      std::ostringstream os;
      os << "lp solution violates row " << r << " (lhs " << lhs << ", rhs " << row.rhs << ") after "
         << res.pivots << " pivots; max |tableau entry| " << t.max_abs();
      throw NumericError(os.str());
    }
  }
  return res;
}

}  // namespace arena
