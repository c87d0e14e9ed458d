// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superlab/quadrature.hpp"
#include "superlab/report.hpp"
#include "superlab/rng.hpp"

namespace superlab {

enum class MotionKind { InwardOU, OutwardOU };

/// Ornstein-Uhlenbeck motion with unit diffusion, generator
/// (1/2)Laplacian -/+ c x.grad on R^d.
///
/// Inward: reference measure m is the stationary Gaussian with density
/// (c/pi)^{d/2} exp(-c|x|^2). Outward: m has density (c/pi)^{-d/2} exp(c|x|^2)
/// (sigma-finite). Both motions are m-symmetric.
struct SpatialMotion {
  MotionKind kind = MotionKind::InwardOU;
  double c = 1.0;
  int d = 1;

  /// Throws ConfigError unless c > 0 and d >= 1.
  void validate() const;

  /// Mean of xi_t is factor(t) * x.
  double mean_factor(double t) const;
  /// Per-coordinate variance of xi_t.
  double variance(double t) const;
  /// Density of m with respect to Lebesgue.
  double reference_density(std::span<const double> x) const;
  /// Sign s in m(dx) proportional to exp(-s c |x|^2) dx.
  double reference_sign() const { return kind == MotionKind::InwardOU ? 1.0 : -1.0; }
  bool reference_is_probability() const { return kind == MotionKind::InwardOU; }

  std::string name() const;
};

/// Exact Gaussian draw of xi_t given xi_0 = x, written into out.
void sample_transition(const SpatialMotion& motion, std::span<const double> x, double t,
                       PathRng& rng, std::span<double> out);
Point sample_transition(const SpatialMotion& motion, std::span<const double> x, double t,
                        PathRng& rng);

/// Transition density of xi_t with respect to m (not Lebesgue).
double transition_density(const SpatialMotion& motion, double t, std::span<const double> x,
                          std::span<const double> y);

/// a_t(x) = int p(t,x,y)^2 m(dy) = p(2t,x,x) for the symmetric OU kernels.
double a_t_diag(const SpatialMotion& motion, double t, std::span<const double> x);
/// a-hat_t(x) = int p(t,y,x)^2 m(dy). Coincides with a_t for the symmetric
/// motions implemented here; no asymmetric instance exists to exercise it.
double a_hat_t_diag(const SpatialMotion& motion, double t, std::span<const double> x);

/// Envelope of y -> p(t,x,y) m(y) (the Lebesgue law of xi_t started at x).
GaussianEnvelope end_point_envelope(const SpatialMotion& motion, double t,
                                    std::span<const double> x);
/// Envelope of y -> p(t,y,x) as a function of the starting point y.
GaussianEnvelope start_point_envelope(const SpatialMotion& motion, double t,
                                      std::span<const double> x);

/// Integral of g against m. For the outward motion (infinite m) an envelope
/// dominating g must be declared; its product with the density of m must
/// still decay, otherwise DomainError is thrown. For the inward motion the
/// envelope is optional and only sharpens the quadrature.
double integrate_reference(const SpatialMotion& motion, const PointFunction& g, int order,
                           const std::optional<GaussianEnvelope>& envelope = std::nullopt);

/// Numerical check of the kernel integrability conditions: (a) mass bound
/// int p(t,y,x) m(dy) <= 1, (b) continuity and m-integrability of a_t, and
/// (c) existence of a grid time with a_t in L^2(m).
ValidationReport validate_assumption1(const SpatialMotion& motion, std::span<const double> t_grid,
                                      const QuadratureSpec& quad);

}  // namespace superlab
