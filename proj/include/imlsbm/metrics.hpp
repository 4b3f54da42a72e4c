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

#ifndef IMLSBM_METRICS_HPP_
#define IMLSBM_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/model.hpp"

namespace imlsbm {

struct LossValue {
  double value = 0.0;  // in [0, 1/2]
  int orientation = 1;  // sign applied to z_hat that attains the minimum
};

// Hamming distance to z minimized over the global sign of z_hat, over n.
inline LossValue misclustering(const Assignment& z_hat, const Assignment& z) {
  detail::require(z_hat.size() == z.size(),
                  "assignments must have equal length");
  detail::require(z.size() > 0, "assignments must be nonempty");
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < z.size(); ++i) mismatches += z_hat[i] != z[i];
  const std::size_t flipped = z.size() - mismatches;
  const double n = static_cast<double>(z.size());
  if (flipped < mismatches) {
    return {static_cast<double>(flipped) / n, -1};
  }
  return {static_cast<double>(mismatches) / n, 1};
}

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single value
  double q05 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
};

// Linear interpolation between order statistics (R type 7).
inline double quantile_sorted(std::span<const double> sorted, double prob) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline Summary summarize(std::span<const double> values) {
  detail::require(!values.empty(), "cannot summarize an empty sample");
  Summary s;
  s.count = values.size();
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.q05 = quantile_sorted(sorted, 0.05);
  s.q25 = quantile_sorted(sorted, 0.25);
  s.q50 = quantile_sorted(sorted, 0.50);
  s.q75 = quantile_sorted(sorted, 0.75);
  s.q95 = quantile_sorted(sorted, 0.95);
  return s;
}

}  // namespace imlsbm

#endif  // IMLSBM_METRICS_HPP_
