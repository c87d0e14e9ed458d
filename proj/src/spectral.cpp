// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "superlab/errors.hpp"

namespace superlab {

const char* to_string(Provenance p) { return p == Provenance::Reference ? "reference" : "derived"; }

SpectralData registry_lookup(const ModelSpec& spec) {
  const auto& mech = spec.branching;
  const auto alpha = mech.alpha_field().constant_value();
  if (!alpha) {
    throw NoSpectralDataError("no registered eigendata for spatially varying alpha (model " +
                              spec.name + ")");
  }
  const auto& motion = spec.spatial;
  const auto dim = static_cast<std::size_t>(motion.d);
  const bool unit_a = mech.a.constant_value() == std::optional<double>(1.0);

  SpectralData sd;
  sd.gap = motion.c;
  sd.gap_provenance = Provenance::Derived;
  sd.lambda0_provenance = unit_a || spec.htransform ? Provenance::Reference : Provenance::Derived;
  if (motion.kind == MotionKind::InwardOU) {
    sd.lambda0 = *alpha;
    sd.phi0 = TestFunction::constant(1.0).with_name("phi0=1");
    sd.phi0_hat = sd.phi0;
    sd.entry = spec.htransform ? "htransform-ou" : "inward-ou";
  } else {
    sd.lambda0 = *alpha - motion.c * motion.d;
    const double amp = std::pow(motion.c / std::numbers::pi, 0.5 * motion.d);
    sd.phi0 = TestFunction::gaussian(amp, motion.c, Point(dim, 0.0)).with_name("phi0=(c/pi)^(d/2)exp(-c|x|^2)");
    sd.phi0_hat = sd.phi0;
    sd.entry = "outward-ou";
  }
  return sd;
}

HTransformData htransform_build(double c, double c1, double c2, int d,
                                const ScalarField& alpha_orig) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("h-transform needs c1 > 0 and c2 > 0");
  if (d < 1) throw DomainError("h-transform needs d >= 1");
  const double disc = c * c - 2.0 * c1;
  if (!(c > 0.0) || !(disc > 0.0)) {
    std::ostringstream os;
    os << "h-transform needs c > sqrt(2 c1); got c=" << c << ", sqrt(2 c1)=" << std::sqrt(2.0 * c1);
    throw DomainError(os.str());
  }
  HTransformData out;
  out.upsilon = 0.5 * (c - std::sqrt(disc));
  out.lambda_c = c2 + d * out.upsilon;
  const double drift = c - 2.0 * out.upsilon;
  out.h = ScalarField::gaussian(std::pow(drift / c, 0.5 * d), -out.upsilon);
  out.transformed_motion = SpatialMotion{MotionKind::InwardOU, drift, d};

  const ScalarField quad = out.h * alpha_orig;
  const auto sup = quad.sup_abs_bound();
  if (!sup) throw ConfigError("h * alpha is not bounded: " + quad.describe());
  auto& mech = out.transformed_branching;
  mech.a = ScalarField::constant(out.lambda_c);
  mech.b = quad;
  mech.beta = ScalarField::constant(1.0);
  DeclaredBounds bounds;
  bounds.a_sup = out.lambda_c;
  bounds.b_sup = *sup;
  bounds.beta_sup = 1.0;
  if (auto lo = quad.lower_bound(); lo && *lo > 0.0) bounds.b_inf = *lo;
  mech.bounds = bounds;
  return out;
}

double LaplaceExponent::operator()(double l) const {
  double v = drift * l;
  for (const auto& [kappa, tau] : jumps) v -= kappa * std::expm1(-l * tau);
  return v;
}

double subordinated_lambda0(double alpha_rate, const LaplaceExponent& phi, double lambda0_tilde) {
  if (lambda0_tilde > 0.0) throw DomainError("base eigenvalue must satisfy lambda0_tilde <= 0");
  if (phi.drift < 0.0) throw DomainError("Laplace exponent drift must be nonnegative");
  for (const auto& [kappa, tau] : phi.jumps) {
    if (kappa < 0.0 || tau <= 0.0) throw DomainError("Laplace exponent jumps need kappa >= 0, tau > 0");
  }
  const double lambda0 = alpha_rate - phi(-lambda0_tilde);
  if (!(lambda0 > 0.0)) {
    std::ostringstream os;
    os << "subordinated model is not supercritical: alpha - phi(-lambda0_tilde) = " << lambda0;
    throw DomainError(os.str());
  }
  return lambda0;
}

std::vector<RegistryRow> registry_table() {
  std::vector<RegistryRow> rows;
  {
    ModelSpec m = model_preset("inward-ou");
    const auto sd = registry_lookup(m);
    rows.push_back({"inward-ou", "beta=1;a=1;c=1;d=1", "lambda0=beta*a", sd.lambda0, sd.gap,
                    "1", to_string(sd.lambda0_provenance), to_string(sd.gap_provenance)});
  }
  {
    PresetParams p;
    p.beta = 3.0;
    ModelSpec m = model_preset("outward-ou", p);
    const auto sd = registry_lookup(m);
    rows.push_back({"outward-ou", "beta=3;a=1;c=1;d=1", "lambda0=beta*a-c*d", sd.lambda0, sd.gap,
                    "(c/pi)^(d/2)exp(-c|x|^2)", to_string(sd.lambda0_provenance),
                    to_string(sd.gap_provenance)});
  }
  {
    PresetParams p;
    p.c = 3.0;
    ModelSpec m = model_preset("htransform-ou", p);
    const auto sd = registry_lookup(m);
    rows.push_back({"htransform-ou", "c=3;c1=2;c2=1;d=1", "lambda0=lambda_c=c2+d*upsilon",
                    sd.lambda0, sd.gap, "1 (for X^h)", to_string(sd.lambda0_provenance),
                    to_string(sd.gap_provenance)});
  }
  {
    const double l0 = subordinated_lambda0(2.0, LaplaceExponent{1.0, {}}, -1.0);
    rows.push_back({"subordinated", "alpha=2;phi(l)=l;lambda0_tilde=-1",
                    "lambda0=alpha-phi(-lambda0_tilde)", l0, std::nan(""), "n/a", "reference", "n/a"});
  }
  return rows;
}

}  // namespace superlab
