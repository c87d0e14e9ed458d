// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "superlab/errors.hpp"
#include "superlab/model.hpp"
#include "superlab/rng.hpp"
#include "superlab/spectral.hpp"

namespace superlab {

namespace {

constexpr double kBoundSlack = 1e-12;

// Deterministic probe set: the origin, the unit axes, and Gaussian draws of
// increasing spread.
std::vector<Point> probe_points(int d) {
  const auto dim = static_cast<std::size_t>(d);
  std::vector<Point> pts;
  pts.emplace_back(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    for (double r : {-2.0, 1.0, 3.0}) {
      Point x(dim, 0.0);
      x[k] = r;
      pts.push_back(x);
    }
  }
  PathRng rng(0x5eedf00dULL, 0);
  for (int i = 0; i < 256; ++i) {
    const double spread = 0.5 + 0.02 * i;
    Point x(dim);
    for (auto& v : x) v = spread * rng.normal();
    pts.push_back(x);
  }
  return pts;
}

std::string fmt_point(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
  os << ")";
  return os.str();
}

// Reports the first probe where pred fails.
template <class Pred>
void probe_check(ValidationReport& r, const std::string& name, const std::vector<Point>& pts,
                 Pred pred, const std::string& what) {
  for (const auto& x : pts) {
    double v = 0.0;
    if (!pred(x, v)) {
      r.add(name, false, what + " violated at x=" + fmt_point(x), v);
      return;
    }
  }
  r.add(name, true, what + " at " + std::to_string(pts.size()) + " probes");
}

}  // namespace

ValidationReport validate_model(const ModelSpec& spec) {
  ValidationReport r;
  r.subject = "model:" + spec.name;
  const auto& mech = spec.branching;

  bool motion_ok = true;
  try {
    spec.spatial.validate();
  } catch (const ConfigError& e) {
    motion_ok = false;
    r.add("spatial:parameters", false, e.what());
  }
  if (motion_ok) r.add("spatial:parameters", true, spec.spatial.name());

  // initial measure
  bool masses_ok = !spec.initial.atoms.empty();
  bool dims_ok = true;
  for (const auto& atom : spec.initial.atoms) {
    masses_ok = masses_ok && std::isfinite(atom.mass) && atom.mass > 0.0;
    dims_ok = dims_ok && atom.position.size() == static_cast<std::size_t>(spec.spatial.d);
  }
  r.add("initial:finite-positive-masses", masses_ok, "total mass", spec.initial.total_mass());
  r.add("initial:dimension", dims_ok, "atom dimension must equal d");
  if (!motion_ok) {
    r.incomplete = true;
    return r;
  }

  const auto pts = probe_points(spec.spatial.d);

  probe_check(r, "nonneg:b", pts, [&](const Point& x, double& v) { return (v = mech.b(x)) >= 0.0; },
              "b >= 0");
  probe_check(r, "nonneg:beta", pts,
              [&](const Point& x, double& v) { return (v = mech.beta(x)) >= 0.0; }, "beta >= 0");
  for (std::size_t i = 0; i < mech.atoms.size(); ++i) {
    const auto& atom = mech.atoms[i];
    const std::string tag = std::to_string(i);
    probe_check(r, "nonneg:w" + tag, pts,
                [&](const Point& x, double& v) { return (v = atom.weight(x)) >= 0.0; },
                "w_" + tag + " >= 0");
    r.add("atom:jump-positive:" + tag, atom.jump > 0.0, "jump size", atom.jump);
  }

  // sup_x sum_i w_i y_i^2 < inf holds iff every weight field is bounded.
  bool second_moment = true;
  double second_sup = 0.0;
  for (const auto& atom : mech.atoms) {
    const auto s = atom.weight.sup_abs_bound();
    second_moment = second_moment && s.has_value();
    if (s) second_sup += *s * atom.jump * atom.jump;
  }
  r.add("second-moment", second_moment, "bound on sup_x sum_i w_i y_i^2", second_sup);

  r.add("bounded:a", mech.a.is_bounded(), mech.a.describe());
  r.add("bounded:b", mech.b.is_bounded(), mech.b.describe());
  r.add("bounded:beta", mech.beta.is_bounded(), mech.beta.describe());

  if (!mech.bounds) {
    r.add("declared-bounds", false, "no global bounds declared");
  } else {
    const auto& bd = *mech.bounds;
    const bool shape = bd.weight_sup.size() == mech.atoms.size();
    r.add("declared-bounds:shape", shape, "one weight bound per atom");
    probe_check(
        r, "declared-bounds:respected", pts,
        [&](const Point& x, double& v) {
          const auto within = [&](double value, double bound) {
            v = value;
            return std::abs(value) <= bound * (1.0 + kBoundSlack) + kBoundSlack;
          };
          if (!within(mech.a(x), bd.a_sup) || !within(mech.b(x), bd.b_sup) ||
              !within(mech.beta(x), bd.beta_sup)) {
            return false;
          }
          for (std::size_t i = 0; shape && i < mech.atoms.size(); ++i) {
            if (!within(mech.atoms[i].weight(x), bd.weight_sup[i])) return false;
          }
          if (bd.b_inf && mech.b(x) < *bd.b_inf * (1.0 - kBoundSlack)) {
            v = mech.b(x);
            return false;
          }
          return true;
        },
        "|field| <= declared bound");
  }

  probe_check(
      r, "drift-carrier:b-positive-where-a-nonzero", pts,
      [&](const Point& x, double& v) {
        v = mech.b(x);
        return mech.a(x) == 0.0 || mech.beta(x) == 0.0 || v > 0.0;
      },
      "b > 0 wherever a != 0");

  if (spec.htransform) {
    const auto hb = (spec.htransform->h * spec.htransform->original_alpha).sup_abs_bound();
    r.add("htransform:h-alpha-bounded", hb.has_value(), "sup |h alpha|", hb.value_or(0.0));
  }

  try {
    const auto sd = registry_lookup(spec);
    std::ostringstream os;
    os << "lambda0 from registry entry " << sd.entry;
    r.add("supercritical", sd.lambda0 > 0.0, os.str(), sd.lambda0);
  } catch (const NoSpectralDataError& e) {
    r.skip("supercritical", e.what());
  }
  return r;
}

ModelSpec model_preset(const std::string& name, const PresetParams& params) {
  const int d = params.d;
  Point x0 = params.initial_position;
  if (x0.empty()) x0.assign(static_cast<std::size_t>(std::max(d, 1)), 0.0);

  ModelSpec spec;
  spec.name = name;
  spec.initial = InitialMeasure::dirac(x0, params.initial_mass);

  if (name == "inward-ou" || name == "outward-ou") {
    spec.spatial = SpatialMotion{name == "inward-ou" ? MotionKind::InwardOU : MotionKind::OutwardOU,
                                 params.c, d};
    auto& mech = spec.branching;
    mech.a = ScalarField::constant(params.a);
    mech.b = ScalarField::constant(params.b);
    mech.beta = ScalarField::constant(params.beta);
    DeclaredBounds bd{std::abs(params.a), std::abs(params.b), std::abs(params.beta), {}, {}};
    for (const auto& [w, y] : params.atoms) {
      mech.atoms.push_back({ScalarField::constant(w), y});
      bd.weight_sup.push_back(std::abs(w));
    }
    if (params.b > 0.0) bd.b_inf = params.b;
    mech.bounds = bd;
    return spec;
  }

  if (name == "htransform-ou") {
    // Quadratic coefficient of the original model chosen so that
    // h * alpha = (b/2)(1 + e^{-|x|^2}): bounded, and bounded below by b/2.
    const double disc = params.c * params.c - 2.0 * params.c1;
    if (!(disc > 0.0) || !(params.c > 0.0)) {
      std::ostringstream os;
      os << "htransform-ou needs c > sqrt(2 c1); got c=" << params.c << ", c1=" << params.c1;
      throw DomainError(os.str());
    }
    const double upsilon = 0.5 * (params.c - std::sqrt(disc));
    const double h_amp = std::pow((params.c - 2.0 * upsilon) / params.c, 0.5 * d);
    const ScalarField alpha_orig = ScalarField::gaussian(0.5 * params.b / h_amp, upsilon) +
                                   ScalarField::gaussian(0.5 * params.b / h_amp, 1.0 + upsilon);
    const auto ht = htransform_build(params.c, params.c1, params.c2, d, alpha_orig);
    spec.spatial = ht.transformed_motion;
    spec.branching = ht.transformed_branching;
    spec.htransform = HTransformLink{
        ht.h,
        ht.lambda_c,
        ht.upsilon,
        SpatialMotion{MotionKind::InwardOU, params.c, d},
        ScalarField::squared_norm(d, params.c1) + ScalarField::constant(params.c2),
        alpha_orig,
    };
    return spec;
  }

  throw ConfigError("unknown model preset '" + name + "'");
}

std::vector<std::string> model_preset_names() { return {"inward-ou", "outward-ou", "htransform-ou"}; }

}  // namespace superlab
