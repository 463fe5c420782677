#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "arena/error.hpp"
#include "arena/game.hpp"

namespace arena {

// Bids are i * epsilon for i in [0, n_bids).
struct BidGrid {
  double epsilon = 0.0;
  int n_bids = 0;

  BidGrid() = default;
  BidGrid(double eps, int n) : epsilon(eps), n_bids(n) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw GridError("bid grid: epsilon must be positive");
    if (n < 2) throw GridError("bid grid: need at least two bids");
  }

  double bid(int i) const { return i * epsilon; }
  double max_bid() const { return bid(n_bids - 1); }

  std::optional<int> index_of(double x) const {
    const double r = x / epsilon;
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9 || k < 0 || k >= n_bids) return std::nullopt;
    return static_cast<int>(k);
  }
  int index_checked(double x, const char* what) const {
    auto k = index_of(x);
    if (!k) throw GridError(std::string(what) + " = " + std::to_string(x) + " is not a grid bid");
    return *k;
  }
  // Largest grid index with bid <= x (x >= 0).
  int floor_index(double x) const {
    const int k = static_cast<int>(std::floor(x / epsilon + 1e-9));
    return std::min(k, n_bids - 1);
  }
};

struct FpaInstance {
  BidGrid grid;
  double v_opt = 0.0;
  std::vector<double> values;  // learner value support, strictly increasing
  std::vector<double> probs;

  int m() const { return static_cast<int>(values.size()); }

  void validate() const {
    BidGrid(grid.epsilon, grid.n_bids);
    grid.index_checked(v_opt, "optimizer value");
    if (values.empty()) throw DomainError("fpa instance: empty value support");
    if (values.size() != probs.size()) throw ShapeError("fpa instance: values and probs differ in length");
    for (std::size_t k = 0; k < values.size(); ++k) {
      grid.index_checked(values[k], "learner value");
      if (k > 0 && !(values[k] > values[k - 1]))
        throw DomainError("fpa instance: values must be strictly increasing");
    }
    check_probability_vector(probs, "fpa instance probs");
  }
};

inline BayesianGame build_fpa(const FpaInstance& inst) {
  inst.validate();
  const int n = inst.grid.n_bids;
  const int cn = inst.m();
  const double eps = inst.grid.epsilon;
  std::vector<double> uo(static_cast<std::size_t>(n) * n * cn, 0.0), ul(uo.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < cn; ++c) {
        const std::size_t k = (static_cast<std::size_t>(i) * n + j) * cn + c;
        if (j >= i)
          ul[k] = inst.values[c] - j * eps;  // learner wins ties
        else
          uo[k] = inst.v_opt - i * eps;
      }
  return BayesianGame(n, n, cn, inst.probs, std::move(uo), std::move(ul));
}

inline FpaInstance standard_fpa(double epsilon, int n_bids, double v_opt, double v_learner) {
  FpaInstance inst{BidGrid(epsilon, n_bids), v_opt, {v_learner}, {1.0}};
  inst.validate();
  return inst;
}

// v_O = 1, values 2, 4, ..., 2^m with Pr[2^i] = 2^-(m-i) for i < m and Pr[2^m] = 2^-(m-1).
inline FpaInstance separation_instance(int m, const BidGrid& grid) {
  if (m < 2) throw ParameterError("separation instance needs m >= 2");
  if (m > 30) throw ParameterError("separation instance: m too large");
  FpaInstance inst;
  inst.grid = BidGrid(grid.epsilon, grid.n_bids);
  inst.v_opt = 1.0;
  for (int i = 1; i <= m; ++i) {
    inst.values.push_back(std::ldexp(1.0, i));
    inst.probs.push_back(i < m ? std::ldexp(1.0, -(m - i)) : std::ldexp(1.0, -(m - 1)));
  }
  if (!grid.index_of(1.0)) throw GridError("separation instance: bid 1 is not on the grid");
  if (grid.max_bid() < std::ldexp(1.0, m))
    throw GridError("separation instance: grid does not reach 2^m = " + std::to_string(std::ldexp(1.0, m)));
  inst.validate();
  return inst;
}

// Optimizer bid CDF from threshold bids b_1 = 0 <= b_2 <= ... <= b_{m+1}, stored as grid indices.
struct StackelbergCdf {
  FpaInstance instance;
  std::vector<int> thresholds;  // m + 1 entries
  double f_zero = 0.0;
};

// Evaluates F at grid index k; beyond b_{m+1} the CDF plateaus.
inline double stackelberg_cdf_at(const StackelbergCdf& cdf, int k) {
  const auto& inst = cdf.instance;
  const double eps = inst.grid.epsilon;
  const int m = inst.m();
  k = std::min(k, cdf.thresholds[m]);
  double f_left = cdf.f_zero;  // F(b_i)
  for (int i = 0; i < m; ++i) {
    const int lo = cdf.thresholds[i], hi = cdf.thresholds[i + 1];
    const double v = inst.values[i];
    if (k <= lo) return f_left;
    if (k <= hi) return (v - lo * eps) * f_left / (v - k * eps);
    if (hi > lo) f_left = (v - lo * eps) * f_left / (v - hi * eps);
  }
  return f_left;
}

inline double stackelberg_cdf_eval(const StackelbergCdf& cdf, double x) {
  if (x < 0.0) return 0.0;
  return stackelberg_cdf_at(cdf, cdf.instance.grid.floor_index(x));
}

// F_0 = 0; F_i(x) = v_{m-i+1} / (2 (v_{m-i+1} - x)) for i in 1..m.
inline double phase_cdf(const FpaInstance& inst, int i, double x) {
  const int m = inst.m();
  if (i < 0 || i > m) throw DomainError("phase index out of range");
  if (x > inst.v_opt + 1e-12) throw DomainError("phase cdf evaluated above the optimizer value");
  if (i == 0) return 0.0;
  const double v = inst.values[m - i];
  return v / (2.0 * (v - x));
}

class PhaseCdfFamily {
 public:
  explicit PhaseCdfFamily(FpaInstance inst) : inst_(std::move(inst)) {}
  int phases() const { return inst_.m(); }
  double operator()(int i, double x) const { return phase_cdf(inst_, i, x); }
  const FpaInstance& instance() const { return inst_; }

 private:
  FpaInstance inst_;
};

}  // namespace arena
