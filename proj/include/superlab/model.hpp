// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superlab/field.hpp"
#include "superlab/report.hpp"
#include "superlab/spatial.hpp"

namespace superlab {

/// One atom of the jump kernel: n(x, dy) gets weight(x) * delta_{jump}(dy).
struct Atom {
  ScalarField weight;
  double jump = 0.0;
};

/// Declared suprema of the coefficient fields. Spot-checked by sampling in
/// validate_model; used for K and for the thinning bounds of the particle
/// scheme. b_inf, when present, is a declared lower bound of b.
struct DeclaredBounds {
  double a_sup = 0.0;  ///< sup |a|
  double b_sup = 0.0;
  double beta_sup = 0.0;
  std::vector<double> weight_sup;  ///< one per atom
  std::optional<double> b_inf;
};

/// psi(x, l) = -a(x) l + b(x) l^2 + sum_i w_i(x) (e^{-l y_i} - 1 + l y_i),
/// branching at rate beta(x).
struct BranchingMechanism {
  ScalarField a;
  ScalarField b;
  std::vector<Atom> atoms;
  ScalarField beta;
  std::optional<DeclaredBounds> bounds;

  /// alpha = beta * a as a field.
  ScalarField alpha_field() const { return beta * a; }
  /// A = beta * (2b + sum_i w_i y_i^2) as a field.
  ScalarField big_a_field() const;
  /// Every coefficient independent of x.
  bool is_homogeneous() const;
  std::string describe() const;
};

double psi_eval(const BranchingMechanism& mech, std::span<const double> x, double lambda);
double alpha_of(const BranchingMechanism& mech, std::span<const double> x);
double big_a_of(const BranchingMechanism& mech, std::span<const double> x);
/// K = sup_x (|alpha| + A) from the declared bounds. ConfigError if none declared.
double k_bound(const BranchingMechanism& mech);

struct InitialAtom {
  Point position;
  double mass = 0.0;
};

/// Finite atomic initial measure (compact support by construction).
struct InitialMeasure {
  std::vector<InitialAtom> atoms;

  static InitialMeasure dirac(Point x, double mass = 1.0);
  double total_mass() const;
};

/// Link from a ground-state-transformed model X^h back to the original model
/// X = (1/h) X^h. The ModelSpec carrying it describes X^h.
struct HTransformLink {
  ScalarField h;
  double lambda_c = 0.0;
  double upsilon = 0.0;
  SpatialMotion original_motion;
  ScalarField original_a;      ///< linear coefficient of the original model
  ScalarField original_alpha;  ///< quadratic coefficient of the original model
};

struct ModelSpec {
  std::string name;
  SpatialMotion spatial;
  BranchingMechanism branching;
  InitialMeasure initial;
  std::optional<HTransformLink> htransform;

  std::string describe() const;
};

/// Standing-assumption checks; failures are report entries. A passing report
/// is required before simulation.
ValidationReport validate_model(const ModelSpec& spec);

/// Parameters accepted by the named presets. Unused fields are ignored by a
/// preset that does not need them.
struct PresetParams {
  double beta = 1.0;
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  int d = 1;
  double c1 = 2.0;  ///< quadratic potential coefficient (h-transform preset)
  double c2 = 1.0;  ///< constant potential coefficient (h-transform preset)
  std::vector<std::pair<double, double>> atoms;  ///< constant (weight, jump) pairs
  double initial_mass = 1.0;
  Point initial_position;  ///< defaults to the origin
};

/// "inward-ou", "outward-ou" or "htransform-ou". Unknown names raise ConfigError.
ModelSpec model_preset(const std::string& name, const PresetParams& params = {});
std::vector<std::string> model_preset_names();

}  // namespace superlab
