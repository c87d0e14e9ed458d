// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace superlab {

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;      ///< unbiased sample variance
  double se_mean = 0.0;       ///< sqrt(variance / n)
  double se_variance = 0.0;   ///< delta-method s.e. of the sample variance
};

/// Two-pass moments; the variance s.e. uses the fourth central moment.
SampleSummary summarize(std::span<const double> xs);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> xs, double p);
double interquartile_range(std::span<const double> xs);
double median_absolute_deviation(std::span<const double> xs, double center);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (x_i, y_i).
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// z = (estimate - target) / se, defined as 0 when both the difference and se vanish.
double z_score(double estimate, double target, double se);

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf);

/// Asymptotic 1% critical value of the KS statistic for n draws.
double ks_critical_1pct(std::size_t n);

}  // namespace superlab

#include <algorithm>
#include <cmath>

namespace superlab {

template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace superlab
