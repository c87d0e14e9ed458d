// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "superlab/errors.hpp"

namespace superlab {

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - s.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(s.n);
  s.variance = m2 / (n - 1.0);
  s.se_mean = std::sqrt(s.variance / n);
  const double mu2 = m2 / n;
  const double mu4 = m4 / n;
  s.se_variance = std::sqrt(std::max(mu4 - mu2 * mu2 * (n - 3.0) / (n - 1.0), 0.0) / n);
  return s;
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw DomainError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double interquartile_range(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  return quantile(v, 0.75) - quantile(v, 0.25);
}

double median_absolute_deviation(std::span<const double> xs, double center) {
  std::vector<double> dev;
  dev.reserve(xs.size());
  for (double x : xs) dev.push_back(std::abs(x - center));
  return quantile(std::move(dev), 0.5);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double z_score(double estimate, double target, double se) {
  const double diff = estimate - target;
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  return diff / se;
}

double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace superlab
