// Copyright 2026 The imlsbm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IMLSBM_RATES_HPP_
#define IMLSBM_RATES_HPP_

// Rate exponents for global and individualized recovery.
//
//   I_t(p, q)   = -log[p^{1-t} q^t + (1-p)^{1-t} (1-q)^t]
//                 -log[p^t q^{1-t} + (1-p)^t (1-q)^{1-t}]
//   J_rho       = -log(2 sqrt(rho (1 - rho)))
//   psi*_S(a)   = sup_{t in [0,1]} a t + (n/2) sum_{l in S} I_t^l
//   I_S         = |S^c| J + psi*_S(0)              |S^c| even
//               = (|S^c| + 1) J + psi*_S(-2J)      |S^c| odd
//   J_S         = the same with the parity read off |S|
//
// Infinity is used as the value of J at rho = 0 and propagates through sums.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/model.hpp"

namespace imlsbm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kRateGuard = 1e-12;
inline constexpr double kRhoFloor = 1e-8;

inline double layer_info(double p, double q, double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  p = std::clamp(p, kRateGuard, 1.0 - kRateGuard);
  q = std::clamp(q, kRateGuard, 1.0 - kRateGuard);
  const double lp = std::log(p);
  const double lq = std::log(q);
  const double lp1 = std::log1p(-p);
  const double lq1 = std::log1p(-q);
  auto factor = [&](double s) {
    return std::exp((1.0 - s) * lp + s * lq) +
           std::exp((1.0 - s) * lp1 + s * lq1);
  };
  const double value = -std::log(factor(t)) - std::log(factor(1.0 - t));
  return std::max(0.0, value);
}

inline double j_rho(double rho, double rho_floor = kRhoFloor) {
  detail::require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  if (rho <= rho_floor || rho >= 1.0 - rho_floor) return kInfinity;
  return -std::log(2.0 * std::sqrt(rho * (1.0 - rho)));
}

struct PsiStar {
  double value = 0.0;
  double argmax_t = 0.0;
};

// Layer data shared by every rate computation on one parameter set.
class RateProblem {
 public:
  RateProblem(std::size_t n, double rho, std::vector<double> p,
              std::vector<double> q, double rho_floor = kRhoFloor)
      : half_n_(static_cast<double>(n) / 2.0),
        rho_(rho),
        j_(j_rho(rho, rho_floor)),
        p_(std::move(p)),
        q_(std::move(q)) {
    detail::require(n >= 1, "n must be positive");
    detail::require(p_.size() == q_.size() && !p_.empty(),
                    "p and q must be nonempty and of equal length");
    for (std::size_t l = 0; l < p_.size(); ++l) {
      detail::require(p_[l] > q_[l], "rates need p > q in every layer");
    }
  }

  explicit RateProblem(const ModelParams& params)
      : RateProblem(params.n, params.rho, params.p, params.q) {}

  std::size_t num_layers() const noexcept { return p_.size(); }
  double half_n() const noexcept { return half_n_; }
  double rho() const noexcept { return rho_; }
  double j() const noexcept { return j_; }

  // (n/2) I_t for one layer.
  double scaled_info(std::size_t l, double t) const {
    return half_n_ * layer_info(p_[l], q_[l], t);
  }

  double psi(std::span<const std::size_t> subset, double t) const {
    double total = 0.0;
    for (std::size_t l : subset) total += scaled_info(l, t);
    return -total;
  }

  // Golden-section maximization of the concave map t -> a t - psi_S(t).
  // For a < 0 the maximizer lies in [0, 1/2] and for a > 0 in [1/2, 1].
  PsiStar psi_star(std::span<const std::size_t> subset, double a,
                   double t_tol = 1e-10) const {
    if (subset.empty()) {
      return a > 0.0 ? PsiStar{a, 1.0} : PsiStar{0.0, 0.0};
    }
    if (a == -kInfinity) return {0.0, 0.0};
    auto h = [&](double t) { return a * t - psi(subset, t); };
    if (a == 0.0) return {h(0.5), 0.5};
    double lo = a < 0.0 ? 0.0 : 0.5;
    double hi = a < 0.0 ? 0.5 : 1.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = h(x1);
    double f2 = h(x2);
    while (hi - lo > t_tol) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = h(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = h(x1);
      }
    }
    PsiStar best{f1, x1};
    if (f2 > best.value) best = {f2, x2};
    const double ends[2] = {a < 0.0 ? 0.0 : 0.5, a < 0.0 ? 0.5 : 1.0};
    for (double t : ends) {
      const double v = h(t);
      if (v > best.value) best = {v, t};
    }
    return best;
  }

  double global_snr(std::span<const std::size_t> subset) const {
    check_subset(subset);
    const std::size_t outside = num_layers() - subset.size();
    return parity_snr(subset, outside);
  }

  double individual_snr(std::span<const std::size_t> subset) const {
    check_subset(subset);
    return parity_snr(subset, subset.size());
  }

 private:
  // count J + psi*(0) for even counts, (count + 1) J + psi*(-2J) for odd.
  double parity_snr(std::span<const std::size_t> subset,
                    std::size_t count) const {
    if (count % 2 == 0) {
      const double noise =
          count == 0 ? 0.0 : static_cast<double>(count) * j_;
      return noise + psi_star(subset, 0.0).value;
    }
    if (j_ == kInfinity) return kInfinity;
    return static_cast<double>(count + 1) * j_ +
           psi_star(subset, -2.0 * j_).value;
  }

  void check_subset(std::span<const std::size_t> subset) const {
    std::vector<bool> seen(num_layers(), false);
    for (std::size_t l : subset) {
      detail::require(l < num_layers(), "subset index out of range");
      detail::require(!seen[l], "subset has a repeated layer");
      seen[l] = true;
    }
  }

  double half_n_;
  double rho_;
  double j_;
  std::vector<double> p_;
  std::vector<double> q_;
};

inline double global_snr(std::span<const std::size_t> subset, std::size_t n,
                         double rho, const std::vector<double>& p,
                         const std::vector<double>& q) {
  return RateProblem(n, rho, p, q).global_snr(subset);
}

inline double individual_snr_J(std::span<const std::size_t> subset,
                               std::size_t n, double rho,
                               const std::vector<double>& p,
                               const std::vector<double>& q) {
  return RateProblem(n, rho, p, q).individual_snr(subset);
}

struct SubsetMinimum {
  double value = kInfinity;
  std::vector<std::size_t> subset;  // sorted layer indices
  bool complement_odd = false;      // parity of |S^c|
  bool certified = true;            // proven optimal
};

struct MinimizerOptions {
  std::size_t t_grid = 2001;
  std::size_t bound_grid = 65;
  std::size_t node_budget = 2000000;
};

// min over S of I_S, optionally with layers forced into S.
//
// Even |S^c|: the objective is separable (each layer pays J outside S or
// (n/2) I_{1/2} inside), so the unconstrained choice is fixed up by toggling
// the layer with the smallest cost gap when the parity is wrong.
//
// Odd |S^c|: I_S = max_t g_S(t) with g_S(t) = (1 - 2t) J + sum_{l not in S} J
// + sum_{l in S} (n/2) I_t^l.  For each t on a grid over [0, 1/2] the
// inner min over S is separable with the same parity repair; the largest
// of these minima is a lower bound (minimax inequality) and the per-t
// minimizers are candidates.  When the best candidate meets the bound the
// answer is certified; otherwise a depth-first branch and bound over the
// free layers closes the gap.
class SnrMinimizer {
 public:
  explicit SnrMinimizer(const RateProblem& problem,
                        MinimizerOptions options = {})
      : problem_(problem), options_(options) {
    detail::require(options_.t_grid >= 3, "t grid needs at least 3 points");
    const std::size_t L = problem.num_layers();
    grid_.resize(options_.t_grid);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      grid_[k] = 0.5 * static_cast<double>(k) /
                 static_cast<double>(grid_.size() - 1);
    }
    table_.assign(L, std::vector<double>(grid_.size()));
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t k = 0; k < grid_.size(); ++k) {
        table_[l][k] = problem.scaled_info(l, grid_[k]);
      }
    }
    half_info_.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      half_info_[l] = table_[l].back();
    }
  }

  SubsetMinimum minimize(std::span<const std::size_t> forced = {}) const {
    std::vector<bool> is_forced(problem_.num_layers(), false);
    for (std::size_t l : forced) {
      detail::require(l < problem_.num_layers(), "forced layer out of range");
      is_forced[l] = true;
    }
    SubsetMinimum even = minimize_even(is_forced);
    SubsetMinimum odd = minimize_odd(is_forced);
    SubsetMinimum best = odd.value < even.value ? odd : even;
    best.certified = even.certified && odd.certified;
    return best;
  }

 private:
  // Separable min of sum_l cost_l(x_l) over in/out with the parity of the
  // out-count fixed.  in_cost[l] is the cost inside S, out_cost outside.
  struct SeparableChoice {
    double value = kInfinity;
    std::vector<bool> in;
  };

  SeparableChoice separable(const std::vector<double>& in_cost,
                            double out_cost, bool want_odd,
                            const std::vector<bool>& is_forced) const {
    const std::size_t L = in_cost.size();
    SeparableChoice choice;
    choice.in.assign(L, true);
    double total = 0.0;
    std::size_t out_count = 0;
    double best_gap = kInfinity;
    std::size_t best_toggle = L;
    for (std::size_t l = 0; l < L; ++l) {
      if (!is_forced[l] && out_cost < in_cost[l]) {
        choice.in[l] = false;
        total += out_cost;
        ++out_count;
      } else {
        total += in_cost[l];
      }
      if (!is_forced[l]) {
        const double gap = std::abs(out_cost - in_cost[l]);
        if (gap < best_gap) {
          best_gap = gap;
          best_toggle = l;
        }
      }
    }
    if ((out_count % 2 == 1) != want_odd) {
      if (best_toggle == L) return {};
      choice.in[best_toggle] = !choice.in[best_toggle];
      total += best_gap;
    }
    choice.value = total;
    return choice;
  }

  static std::vector<std::size_t> to_subset(const std::vector<bool>& in) {
    std::vector<std::size_t> subset;
    for (std::size_t l = 0; l < in.size(); ++l) {
      if (in[l]) subset.push_back(l);
    }
    return subset;
  }

  SubsetMinimum minimize_even(const std::vector<bool>& is_forced) const {
    const double j = problem_.j();
    SubsetMinimum out;
    if (j == kInfinity) {
      out.subset.resize(problem_.num_layers());
      std::iota(out.subset.begin(), out.subset.end(), std::size_t{0});
    } else {
      const SeparableChoice choice =
          separable(half_info_, j, false, is_forced);
      if (choice.value == kInfinity) return out;
      out.subset = to_subset(choice.in);
    }
    out.value = problem_.global_snr(out.subset);
    out.complement_odd = false;
    return out;
  }

  SubsetMinimum minimize_odd(const std::vector<bool>& is_forced) const {
    const double j = problem_.j();
    SubsetMinimum out;
    out.complement_odd = true;
    if (j == kInfinity) return out;
    const std::size_t L = problem_.num_layers();

    double lower = -kInfinity;
    std::map<std::vector<bool>, bool> candidates;
    std::vector<double> in_cost(L);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      for (std::size_t l = 0; l < L; ++l) in_cost[l] = table_[l][k];
      const SeparableChoice choice = separable(in_cost, j, true, is_forced);
      if (choice.value == kInfinity) return out;  // no odd subset exists
      lower = std::max(lower, (1.0 - 2.0 * grid_[k]) * j + choice.value);
      candidates.emplace(choice.in, true);
    }
    for (const auto& [in, unused] : candidates) {
      std::vector<std::size_t> subset = to_subset(in);
      const double value = problem_.global_snr(subset);
      if (value < out.value) {
        out.value = value;
        out.subset = std::move(subset);
      }
    }
    if (out.value <= lower + 1e-12 * std::abs(lower)) return out;
    branch_and_bound(is_forced, out);
    return out;
  }

  void branch_and_bound(const std::vector<bool>& is_forced,
                        SubsetMinimum& best) const {
    const double j = problem_.j();
    const std::size_t L = problem_.num_layers();
    // Coarse t grid for bounds, always including the incumbent's maximizer.
    std::vector<std::size_t> ts;
    const std::size_t stride =
        std::max<std::size_t>(1, (grid_.size() - 1) / (options_.bound_grid - 1));
    for (std::size_t k = 0; k < grid_.size(); k += stride) ts.push_back(k);
    if (ts.back() != grid_.size() - 1) ts.push_back(grid_.size() - 1);
    const std::size_t T = ts.size();

    std::vector<std::size_t> free;
    std::vector<double> base(T, 0.0);
    for (std::size_t a = 0; a < T; ++a) {
      base[a] = (1.0 - 2.0 * grid_[ts[a]]) * j;
    }
    for (std::size_t l = 0; l < L; ++l) {
      if (is_forced[l]) {
        for (std::size_t a = 0; a < T; ++a) base[a] += table_[l][ts[a]];
      } else {
        free.push_back(l);
      }
    }
    // Strongest layers first: they decide the bound fastest.
    std::sort(free.begin(), free.end(), [&](std::size_t a, std::size_t b) {
      return half_info_[a] > half_info_[b];
    });
    const std::size_t F = free.size();
    // suffix[d][a] = sum over free[d..] of min(J, (n/2) I_t).
    std::vector<std::vector<double>> suffix(F + 1, std::vector<double>(T, 0.0));
    for (std::size_t d = F; d-- > 0;) {
      for (std::size_t a = 0; a < T; ++a) {
        suffix[d][a] =
            suffix[d + 1][a] + std::min(j, table_[free[d]][ts[a]]);
      }
    }

    std::vector<bool> in(L, false);
    for (std::size_t l = 0; l < L; ++l) in[l] = is_forced[l];
    std::size_t nodes = 0;
    bool exhausted = false;
    std::vector<std::vector<double>> partial(F + 1, std::vector<double>(T));
    partial[0] = base;

    auto recurse = [&](auto&& self, std::size_t depth,
                       std::size_t out_count) -> void {
      if (exhausted) return;
      if (++nodes > options_.node_budget) {
        exhausted = true;
        return;
      }
      double bound = -kInfinity;
      for (std::size_t a = 0; a < T; ++a) {
        bound = std::max(bound, partial[depth][a] + suffix[depth][a]);
      }
      if (bound >= best.value) return;
      if (depth == F) {
        if (out_count % 2 == 1) {
          std::vector<std::size_t> subset = to_subset(in);
          const double value = problem_.global_snr(subset);
          if (value < best.value) {
            best.value = value;
            best.subset = std::move(subset);
          }
        }
        return;
      }
      const std::size_t l = free[depth];
      // Branch on the cheaper side first.
      const bool prefer_in = half_info_[l] < j;
      for (int side = 0; side < 2; ++side) {
        const bool take_in = (side == 0) == prefer_in;
        in[l] = take_in;
        for (std::size_t a = 0; a < T; ++a) {
          partial[depth + 1][a] =
              partial[depth][a] + (take_in ? table_[l][ts[a]] : j);
        }
        self(self, depth + 1, out_count + (take_in ? 0 : 1));
      }
      in[l] = false;
    };
    recurse(recurse, 0, 0);
    if (exhausted) best.certified = false;
  }

  const RateProblem& problem_;
  MinimizerOptions options_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> table_;
  std::vector<double> half_info_;
};

inline SubsetMinimum minimize_global_snr(std::size_t n, double rho,
                                         const std::vector<double>& p,
                                         const std::vector<double>& q,
                                         std::size_t t_grid = 2001) {
  detail::require(t_grid >= 1001, "t grid must have at least 1001 points");
  const RateProblem problem(n, rho, p, q);
  MinimizerOptions options;
  options.t_grid = t_grid;
  return SnrMinimizer(problem, options).minimize();
}

struct IndividualMinimum {
  SubsetMinimum info;  // min over S not containing l of I_{S u {l}}
  double j_single = kInfinity;  // J_{{l}}
};

inline IndividualMinimum minimize_individual_snr(
    std::size_t layer, std::size_t n, double rho, const std::vector<double>& p,
    const std::vector<double>& q, std::size_t t_grid = 2001) {
  detail::require(t_grid >= 1001, "t grid must have at least 1001 points");
  const RateProblem problem(n, rho, p, q);
  detail::require(layer < problem.num_layers(), "layer out of range");
  MinimizerOptions options;
  options.t_grid = t_grid;
  IndividualMinimum out;
  const std::size_t forced[1] = {layer};
  out.info = SnrMinimizer(problem, options).minimize(forced);
  out.j_single = problem.individual_snr(forced);
  return out;
}

struct LayerRate {
  SubsetMinimum info;
  double j_single = kInfinity;
  double predicted_exponent = 0.0;  // exp(-min I) + exp(-J_{l})
};

struct RateReport {
  double j_rho = 0.0;
  double m = 0.0;  // n / 2
  SubsetMinimum global;
  double predicted_global_exponent = 0.0;  // exp(-min_S I_S)
  std::vector<LayerRate> layers;
};

inline RateReport rate_report(const ModelParams& params,
                              std::size_t t_grid = 2001) {
  params.validate();
  const RateProblem problem(params);
  MinimizerOptions options;
  options.t_grid = t_grid;
  const SnrMinimizer minimizer(problem, options);
  RateReport report;
  report.j_rho = problem.j();
  report.m = problem.half_n();
  report.global = minimizer.minimize();
  report.predicted_global_exponent = std::exp(-report.global.value);
  for (std::size_t l = 0; l < params.L; ++l) {
    LayerRate rate;
    const std::size_t forced[1] = {l};
    rate.info = minimizer.minimize(forced);
    rate.j_single = problem.individual_snr(forced);
    rate.predicted_exponent =
        std::exp(-rate.info.value) + std::exp(-rate.j_single);
    report.layers.push_back(std::move(rate));
  }
  return report;
}

}  // namespace imlsbm

#endif  // IMLSBM_RATES_HPP_
