// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/model.hpp"

#include <cmath>
#include <sstream>

#include "superlab/errors.hpp"

namespace superlab {

namespace {

// e^{-u} - 1 + u without cancellation for small u
double compensated_exp(double u) {
  if (std::abs(u) < 1e-3) return u * u * (0.5 - u * (1.0 / 6.0 - u / 24.0));
  return std::expm1(-u) + u;
}

}  // namespace

ScalarField BranchingMechanism::big_a_field() const {
  ScalarField inner = b * 2.0;
  for (const auto& atom : atoms) inner = inner + atom.weight * (atom.jump * atom.jump);
  return beta * inner;
}

bool BranchingMechanism::is_homogeneous() const {
  if (!a.is_constant() || !b.is_constant() || !beta.is_constant()) return false;
  for (const auto& atom : atoms) {
    if (!atom.weight.is_constant()) return false;
  }
  return true;
}

std::string BranchingMechanism::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << "a=" << a.describe() << ";b=" << b.describe() << ";beta=" << beta.describe();
  for (const auto& atom : atoms) os << ";atom(" << atom.weight.describe() << "@" << atom.jump << ")";
  if (bounds) {
    os << ";bounds(a=" << bounds->a_sup << ",b=" << bounds->b_sup << ",beta=" << bounds->beta_sup;
    for (double w : bounds->weight_sup) os << ",w=" << w;
    if (bounds->b_inf) os << ",b_inf=" << *bounds->b_inf;
    os << ")";
  }
  return os.str();
}

double psi_eval(const BranchingMechanism& mech, std::span<const double> x, double lambda) {
  if (lambda < 0.0) throw DomainError("psi_eval requires lambda >= 0");
  double v = -mech.a(x) * lambda + mech.b(x) * lambda * lambda;
  for (const auto& atom : mech.atoms) v += atom.weight(x) * compensated_exp(lambda * atom.jump);
  return v;
}

double alpha_of(const BranchingMechanism& mech, std::span<const double> x) {
  return mech.beta(x) * mech.a(x);
}

double big_a_of(const BranchingMechanism& mech, std::span<const double> x) {
  double second = 2.0 * mech.b(x);
  for (const auto& atom : mech.atoms) second += atom.weight(x) * atom.jump * atom.jump;
  return mech.beta(x) * second;
}

double k_bound(const BranchingMechanism& mech) {
  if (!mech.bounds) throw ConfigError("k_bound needs declared global bounds");
  const auto& bd = *mech.bounds;
  if (bd.weight_sup.size() != mech.atoms.size()) {
    throw ConfigError("declared bounds must list one weight bound per atom");
  }
  double second = 2.0 * bd.b_sup;
  for (std::size_t i = 0; i < mech.atoms.size(); ++i) {
    second += bd.weight_sup[i] * mech.atoms[i].jump * mech.atoms[i].jump;
  }
  return bd.beta_sup * bd.a_sup + bd.beta_sup * second;
}

InitialMeasure InitialMeasure::dirac(Point x, double mass) {
  return InitialMeasure{{InitialAtom{std::move(x), mass}}};
}

double InitialMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& atom : atoms) s += atom.mass;
  return s;
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << name << "|" << spatial.name() << "|" << branching.describe() << "|mu=";
  for (const auto& atom : initial.atoms) {
    os << atom.mass << "@(";
    for (std::size_t k = 0; k < atom.position.size(); ++k) {
      os << (k ? "," : "") << atom.position[k];
    }
    os << ")";
  }
  if (htransform) os << "|h=" << htransform->h.describe() << ",lambda_c=" << htransform->lambda_c;
  return os.str();
}

}  // namespace superlab
