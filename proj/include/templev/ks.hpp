// Kolmogorov-Smirnov statistics with asymptotic critical values.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "templev/common.hpp"

namespace templev {

struct KsResult {
  double d = 0.0;
  double critical_5pct = 0.0;
  double critical_1pct = 0.0;

  bool reject_5pct() const { return d > critical_5pct; }
  bool reject_1pct() const { return d > critical_1pct; }
};

inline constexpr double ks_c_5pct = 1.3581;
inline constexpr double ks_c_1pct = 1.6276;

// One-sample KS against a cdf callable.
inline KsResult ks_statistic(std::vector<double> sample,
                             const std::function<double(double)>& cdf_fn) {
  if (sample.empty()) throw EmptySample("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf_fn(sample[i]);
    d = std::max(d, std::fabs((i + 1) / n - f));
    d = std::max(d, std::fabs(i / n - f));
  }
  const double root = std::sqrt(n);
  return {d, ks_c_5pct / root, ks_c_1pct / root};
}

// Two-sample KS.
inline KsResult ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptySample("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double factor = std::sqrt((na + nb) / (na * nb));
  return {d, ks_c_5pct * factor, ks_c_1pct * factor};
}

}  // namespace templev
