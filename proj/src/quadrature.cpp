// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "superlab/errors.hpp"

namespace superlab {

namespace {

QuadratureRule build_hermite(int n) {
  // Newton iteration on orthonormal Hermite functions; initial guesses as in
  // Numerical Recipes' gauher.
  constexpr double kPiM4 = 0.7511255444649425;  // pi^{-1/4}
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  auto& x = rule.nodes;
  auto& w = rule.weights;
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = kPiM4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    x[a] = z;
    x[b] = -z;
    w[a] = w[b] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

QuadratureRule build_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-16) break;
    }
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[a] = -z;
    rule.nodes[b] = z;
    rule.weights[a] = rule.weights[b] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return rule;
}

const QuadratureRule& cached(std::map<int, QuadratureRule>& cache, std::mutex& mu, int order,
                             QuadratureRule (*build)(int)) {
  if (order < 2) throw DomainError("quadrature order must be at least 2");
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build(order)).first;
  return it->second;
}

/// Sum over the tensor grid of prod_k w_{i_k} * h(node point).
template <class Fn>
double tensor_sum(const QuadratureRule& rule, std::size_t dim, Fn&& at) {
  const std::size_t n = rule.nodes.size();
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> z(dim, 0.0);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
      z[k] = rule.nodes[idx[k]];
      w *= rule.weights[idx[k]];
    }
    total += w * at(std::span<const double>(z));
    std::size_t k = 0;
    while (k < dim && ++idx[k] == n) idx[k++] = 0;
    if (k == dim) break;
  }
  return total;
}

}  // namespace

const QuadratureRule& gauss_hermite(int order) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return cached(cache, mu, order, &build_hermite);
}

const QuadratureRule& gauss_legendre(int order) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return cached(cache, mu, order, &build_legendre);
}

GaussianEnvelope combine(const GaussianEnvelope& a, const GaussianEnvelope& b) {
  const std::size_t dim = std::max(a.center.size(), b.center.size());
  GaussianEnvelope out;
  out.rate = a.rate + b.rate;
  out.center.assign(dim, 0.0);
  if (out.rate == 0.0) return out;
  for (std::size_t k = 0; k < dim; ++k) {
    const double ca = k < a.center.size() ? a.center[k] : 0.0;
    const double cb = k < b.center.size() ? b.center[k] : 0.0;
    out.center[k] = (a.rate * ca + b.rate * cb) / out.rate;
  }
  return out;
}

double integrate_lebesgue(const PointFunction& g, const GaussianEnvelope& envelope, int order) {
  if (!(envelope.rate > 0.0)) {
    throw DomainError("integrand has no dominating Gaussian (envelope rate must be positive)");
  }
  const auto& rule = gauss_hermite(order);
  const std::size_t dim = envelope.center.size();
  const double scale = 1.0 / std::sqrt(envelope.rate);
  std::vector<double> y(dim);
  const double sum = tensor_sum(rule, dim, [&](std::span<const double> z) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      y[k] = envelope.center[k] + scale * z[k];
      r2 += z[k] * z[k];
    }
    // g / w with w(y) = exp(-|z|^2)
    return g(y) * std::exp(r2);
  });
  return sum * std::pow(scale, static_cast<double>(dim));
}

double gaussian_expectation(const PointFunction& g, std::span<const double> mean, double sd,
                            int order) {
  if (sd == 0.0) return g(mean);
  const auto& rule = gauss_hermite(order);
  const std::size_t dim = mean.size();
  const double scale = sd * std::numbers::sqrt2;
  std::vector<double> y(dim);
  const double sum = tensor_sum(rule, dim, [&](std::span<const double> z) {
    for (std::size_t k = 0; k < dim; ++k) y[k] = mean[k] + scale * z[k];
    return g(y);
  });
  return sum * std::pow(std::numbers::pi, -0.5 * static_cast<double>(dim));
}

double gaussian_expectation(const PointFunction& g, std::span<const double> mean, double sd,
                            const GaussianEnvelope& envelope, int order) {
  if (sd == 0.0) return g(mean);
  const std::size_t dim = mean.size();
  const double kernel_rate = 1.0 / (2.0 * sd * sd);
  const double kappa = kernel_rate + envelope.rate;
  if (!(kappa > 0.0)) throw DomainError("envelope overwhelms the Gaussian kernel");
  std::vector<double> center(dim);
  double sep2 = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double c = k < envelope.center.size() ? envelope.center[k] : 0.0;
    center[k] = (kernel_rate * mean[k] + envelope.rate * c) / kappa;
    sep2 += (mean[k] - c) * (mean[k] - c);
  }
  const double log_prefactor = -kernel_rate * envelope.rate / kappa * sep2;
  const auto& rule = gauss_hermite(order);
  const double scale = 1.0 / std::sqrt(kappa);
  std::vector<double> y(dim);
  const double sum = tensor_sum(rule, dim, [&](std::span<const double> z) {
    double env_exponent = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      y[k] = center[k] + scale * z[k];
      const double c = k < envelope.center.size() ? envelope.center[k] : 0.0;
      env_exponent += (y[k] - c) * (y[k] - c);
    }
    const double gv = g(y);
    if (gv == 0.0) return 0.0;
    // g / envelope, with the kernel/envelope constant folded in log space.
    return gv * std::exp(envelope.rate * env_exponent + log_prefactor);
  });
  const double d = static_cast<double>(dim);
  return sum * std::pow(2.0 * std::numbers::pi * sd * sd, -0.5 * d) * std::pow(scale, d);
}

QuadratureRule composite_legendre(std::span<const double> breakpoints, int order) {
  const auto& base = gauss_legendre(order);
  QuadratureRule out;
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const double a = breakpoints[p];
    const double b = breakpoints[p + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      out.nodes.push_back(mid + half * base.nodes[i]);
      out.weights.push_back(half * base.weights[i]);
    }
  }
  return out;
}

std::vector<double> graded_breakpoints(double t, int panels) {
  panels = std::max(panels, 2);
  const int uniform = panels / 2;
  const int graded = panels - uniform;
  std::vector<double> bp;
  for (int i = 0; i <= uniform; ++i) bp.push_back(0.5 * t * i / uniform);
  double gap = 0.5 * t;
  for (int i = 1; i < graded; ++i) {
    gap *= 0.5;
    bp.push_back(t - gap);
  }
  bp.push_back(t);
  return bp;
}

}  // namespace superlab
