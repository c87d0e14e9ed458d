// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "superlab/model.hpp"
#include "superlab/test_function.hpp"

namespace superlab {

/// Where a registered value comes from: stated in the literature for the
/// example, or derived here (for instance classical OU spectral theory).
enum class Provenance { Reference, Derived };

const char* to_string(Provenance p);

/// Principal eigendata. phi0 is normalised in L^2(m) and <phi0, phi0_hat>_m = 1.
struct SpectralData {
  double lambda0 = 0.0;
  double gap = 0.0;
  Provenance lambda0_provenance = Provenance::Reference;
  Provenance gap_provenance = Provenance::Derived;
  TestFunction phi0;
  TestFunction phi0_hat;
  std::string entry;  ///< registry entry that produced the data
};

/// Closed-form registry for constant-alpha OU models:
/// inward lambda0 = beta*a with phi0 = phi0_hat = 1; outward
/// lambda0 = beta*a - c*d with phi0 = phi0_hat = (c/pi)^{d/2} e^{-c|x|^2}.
/// The gap is c in both cases. NoSpectralDataError otherwise.
SpectralData registry_lookup(const ModelSpec& spec);

/// Ground-state transform of the inward OU model with linear coefficient
/// c1|x|^2 + c2 (branching rate 1).
struct HTransformData {
  double upsilon = 0.0;
  double lambda_c = 0.0;
  ScalarField h;
  SpatialMotion transformed_motion;
  BranchingMechanism transformed_branching;
};

/// upsilon = (c - sqrt(c^2 - 2 c1))/2, lambda_c = c2 + d upsilon,
/// h = ((c - 2 upsilon)/c)^{d/2} e^{upsilon |x|^2}; transformed motion is the
/// inward OU with drift c - 2 upsilon and psi^h(x,z) = -lambda_c z + h alpha z^2.
/// DomainError unless c > sqrt(2 c1) and c1, c2 > 0; ConfigError if h*alpha
/// is not structurally bounded.
HTransformData htransform_build(double c, double c1, double c2, int d,
                                const ScalarField& alpha_orig);

/// phi(l) = drift*l + sum_i kappa_i (1 - e^{-l tau_i}); entire, so it is
/// evaluated at negative arguments by the same expression.
struct LaplaceExponent {
  double drift = 0.0;
  std::vector<std::pair<double, double>> jumps;  ///< (kappa_i, tau_i)

  double operator()(double l) const;
};

/// lambda0 = alpha - phi(-lambda0_tilde) for a subordinated motion whose
/// base eigenvalue lambda0_tilde <= 0. DomainError unless the result is
/// positive and lambda0_tilde <= 0.
double subordinated_lambda0(double alpha_rate, const LaplaceExponent& phi, double lambda0_tilde);

/// One row of the registry table.
struct RegistryRow {
  std::string entry;
  std::string parameters;
  std::string lambda0_rule;
  double lambda0 = 0.0;
  double gap = 0.0;
  std::string phi0;
  std::string provenance;      ///< of lambda0
  std::string gap_provenance;
};

/// The registered entries evaluated at representative parameters.
std::vector<RegistryRow> registry_table();

}  // namespace superlab
