// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "superlab/field.hpp"

namespace superlab {

/// Nodes and weights of a one-dimensional rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-z^2) on R. Cached per order; the
/// returned reference stays valid for the process lifetime.
const QuadratureRule& gauss_hermite(int order);
/// Gauss-Legendre rule on [-1, 1]. Cached per order.
const QuadratureRule& gauss_legendre(int order);

/// Numerical settings shared by every oracle.
struct QuadratureSpec {
  int order = 64;          ///< Gauss-Hermite nodes per axis
  int time_panels = 24;    ///< composite Gauss-Legendre panels for time integrals
  int time_order = 16;     ///< Gauss-Legendre nodes per panel
  double horizon = 0.0;    ///< resolvent truncation horizon; 0 selects it from tolerance
  double tolerance = 1e-13;
};

/// Isotropic Gaussian envelope exp(-rate * |y - center|^2). Declares the
/// Gaussian factor that dominates an integrand so that quadrature can be
/// centred and scaled to it.
struct GaussianEnvelope {
  Point center;
  double rate = 0.0;
};

/// Product of two envelopes (rates add, centres combine by rate weighting).
GaussianEnvelope combine(const GaussianEnvelope& a, const GaussianEnvelope& b);

using PointFunction = std::function<double(std::span<const double>)>;

/// Integral of g over R^d against Lebesgue measure, computed as
/// int (g / w) w dy with w the declared envelope (tensor Gauss-Hermite).
double integrate_lebesgue(const PointFunction& g, const GaussianEnvelope& envelope, int order);

/// E[g(mean + sd * Z)], Z standard normal in R^d (tensor Gauss-Hermite).
double gaussian_expectation(const PointFunction& g, std::span<const double> mean, double sd,
                            int order);

/// E[g(mean + sd * Z)] when g carries the declared envelope: the quadrature is
/// built on the product of the normal kernel and the envelope, which stays
/// accurate when sd is much wider than the envelope.
double gaussian_expectation(const PointFunction& g, std::span<const double> mean, double sd,
                            const GaussianEnvelope& envelope, int order);

/// Composite Gauss-Legendre nodes on [a, b] over the given panel breakpoints.
QuadratureRule composite_legendre(std::span<const double> breakpoints, int order);

/// Breakpoints on [0, t]: uniform panels on [0, t/2] and geometrically
/// shrinking panels that accumulate at t.
std::vector<double> graded_breakpoints(double t, int panels);

}  // namespace superlab
