// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "superlab/model.hpp"
#include "superlab/quadrature.hpp"
#include "superlab/spectral.hpp"
#include "superlab/test_function.hpp"

namespace superlab {

/// Constant value of alpha = beta * a. UnsupportedModelError when alpha varies in x.
double constant_alpha(const ModelSpec& spec);

/// Envelope of y -> P_t g(y) when g is dominated by env.
GaussianEnvelope propagate_envelope(const SpatialMotion& motion, double t,
                                    const GaussianEnvelope& env);

/// P_t g(x) = E g(xi_t), xi_0 = x, for a pointwise function with optional envelope.
double transition_expectation(const SpatialMotion& motion, double t, const PointFunction& g,
                              std::span<const double> x, int order,
                              const std::optional<GaussianEnvelope>& env = std::nullopt);

/// T_t f(x) = e^{alpha t} P_t f(x).
double mean_semigroup(const ModelSpec& spec, double t, const TestFunction& f,
                      std::span<const double> x, const QuadratureSpec& quad);

/// Var_{delta_x} <f, X_t> = int_0^t T_s[A (T_{t-s} f)^2](x) ds.
double variance_oracle(const ModelSpec& spec, double t, const TestFunction& f,
                       std::span<const double> x, const QuadratureSpec& quad);

/// Truncation horizon for int_0^inf e^{-qs} T_s f ds given the growth rate of T_s f.
double resolvent_horizon(double q, double growth, const QuadratureSpec& quad);

/// int_0^inf e^{-qs} T_s f(x) ds for any q > alpha (convergent Laplace
/// transform of the mean). Truncated at resolvent_horizon(q, alpha).
double laplace_transform_mean(const ModelSpec& spec, double q, const TestFunction& f,
                              std::span<const double> x, const QuadratureSpec& quad);

/// U_q f(x) with the strict admissibility q > max{K, lambda0}; DomainError otherwise.
double resolvent(const ModelSpec& spec, double q, const TestFunction& f, std::span<const double> x,
                 const QuadratureSpec& quad);

/// <g, phi0_hat>_m. For the outward motion phi0_hat supplies the decay.
double pairing_with_phi0_hat(const ModelSpec& spec, const SpectralData& sd, const PointFunction& g,
                             const std::optional<GaussianEnvelope>& g_envelope,
                             const QuadratureSpec& quad);
double pairing_with_phi0_hat(const ModelSpec& spec, const SpectralData& sd, const TestFunction& f,
                             const QuadratureSpec& quad);

/// Envelope of y -> U_q f(y) (or the Laplace transform of the mean) when f has one.
std::optional<GaussianEnvelope> resolvent_envelope(const SpatialMotion& motion,
                                                   const TestFunction& f);

/// T^{phi0}_t f(x) = e^{-lambda0 t} T_t(f phi0)(x) / phi0(x).
double h_semigroup(const ModelSpec& spec, double t, const TestFunction& f,
                   std::span<const double> x, const QuadratureSpec& quad);

/// Mean of <f, X_t> for the original model X = (1/h) X^h of an h-transform
/// preset started from delta_x: h(x) T^h_t(f/h)(x).
double original_mean_semigroup(const ModelSpec& spec, double t, const TestFunction& f,
                               std::span<const double> x, const QuadratureSpec& quad);

struct FellerResult {
  std::vector<double> times;
  std::vector<double> gaps;  ///< sup over grid of |T^{phi0}_t f - f|
  double sup_f = 0.0;        ///< max over grid of |f|
  bool monotone = false;     ///< gaps strictly decrease along times (or are all zero)
};

/// Sup-norm gaps of the h-semigroup along decreasing times. DomainError
/// unless f is flagged C_0.
FellerResult feller_check(const ModelSpec& spec, const TestFunction& f,
                          std::span<const double> t_sequence, std::span<const Point> grid,
                          const QuadratureSpec& quad);

/// u_theta(t) from u' = -beta psi(u), u(0) = theta (adaptive Dormand-Prince,
/// 1e-10 absolute and relative). Requires spatially homogeneous branching.
double log_laplace_ode(const ModelSpec& spec, double theta, double t);

/// Logistic closed form of the same ODE without atoms.
double logistic_log_laplace(double a, double b, double beta, double theta, double t);

struct ExtinctionResult {
  double probability = 1.0;   ///< per unit initial mass
  bool deterministic = false; ///< no quadratic or jump noise: survival is certain
  std::string method;
};

/// exp(-u_inf): closed form exp(-a/b) without atoms, otherwise the ODE limit
/// from theta = 1e6 integrated until stationary to 1e-8.
ExtinctionResult extinction_probability(const ModelSpec& spec);

}  // namespace superlab
