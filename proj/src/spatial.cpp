// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/spatial.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "superlab/errors.hpp"

namespace superlab {

namespace {

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0)) {
    std::ostringstream os;
    os << what << ": time must be positive, got " << t;
    throw DomainError(os.str());
  }
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// log of the density of m with respect to Lebesgue
double log_reference_density(const SpatialMotion& m, std::span<const double> x) {
  const double half_d = 0.5 * m.d;
  const double log_norm = half_d * std::log(m.c / std::numbers::pi);
  return m.reference_sign() * (log_norm - m.c * squared_norm(x));
}

// a_t(x) = A exp(G |x|^2); returns G.
double a_t_growth(const SpatialMotion& m, double t) {
  const double theta = m.mean_factor(2.0 * t);
  const double v = m.variance(2.0 * t);
  return m.reference_sign() * m.c - (1.0 - theta) * (1.0 - theta) / (2.0 * v);
}

}  // namespace

void SpatialMotion::validate() const {
  if (!(c > 0.0)) throw ConfigError("OU drift coefficient c must be positive");
  if (d < 1) throw ConfigError("spatial dimension must be at least 1");
}

double SpatialMotion::mean_factor(double t) const {
  return kind == MotionKind::InwardOU ? std::exp(-c * t) : std::exp(c * t);
}

double SpatialMotion::variance(double t) const {
  // (1 - e^{-2ct}) / 2c and (e^{2ct} - 1) / 2c, written with expm1 for small t.
  return kind == MotionKind::InwardOU ? -std::expm1(-2.0 * c * t) / (2.0 * c)
                                      : std::expm1(2.0 * c * t) / (2.0 * c);
}

double SpatialMotion::reference_density(std::span<const double> x) const {
  return std::exp(log_reference_density(*this, x));
}

std::string SpatialMotion::name() const {
  std::ostringstream os;
  os << (kind == MotionKind::InwardOU ? "inward-ou" : "outward-ou") << "(c=" << c << ",d=" << d
     << ")";
  return os.str();
}

void sample_transition(const SpatialMotion& motion, std::span<const double> x, double t,
                       PathRng& rng, std::span<double> out) {
  require_positive_time(t, "sample_transition");
  const double f = motion.mean_factor(t);
  const double sd = std::sqrt(motion.variance(t));
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = f * x[k] + sd * rng.normal();
}

Point sample_transition(const SpatialMotion& motion, std::span<const double> x, double t,
                        PathRng& rng) {
  Point out(x.size());
  sample_transition(motion, x, t, rng, out);
  return out;
}

double transition_density(const SpatialMotion& motion, double t, std::span<const double> x,
                          std::span<const double> y) {
  require_positive_time(t, "transition_density");
  const double f = motion.mean_factor(t);
  const double v = motion.variance(t);
  double dist2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = y[k] - f * x[k];
    dist2 += diff * diff;
  }
  const double log_lebesgue =
      -0.5 * motion.d * std::log(2.0 * std::numbers::pi * v) - dist2 / (2.0 * v);
  return std::exp(log_lebesgue - log_reference_density(motion, y));
}

double a_t_diag(const SpatialMotion& motion, double t, std::span<const double> x) {
  require_positive_time(t, "a_t_diag");
  return transition_density(motion, 2.0 * t, x, x);
}

double a_hat_t_diag(const SpatialMotion& motion, double t, std::span<const double> x) {
  return a_t_diag(motion, t, x);
}

GaussianEnvelope end_point_envelope(const SpatialMotion& motion, double t,
                                    std::span<const double> x) {
  const double f = motion.mean_factor(t);
  GaussianEnvelope env;
  env.rate = 1.0 / (2.0 * motion.variance(t));
  for (double xi : x) env.center.push_back(f * xi);
  return env;
}

GaussianEnvelope start_point_envelope(const SpatialMotion& motion, double t,
                                      std::span<const double> x) {
  const double f = motion.mean_factor(t);
  GaussianEnvelope env;
  env.rate = f * f / (2.0 * motion.variance(t));
  for (double xi : x) env.center.push_back(xi / f);
  return env;
}

double integrate_reference(const SpatialMotion& motion, const PointFunction& g, int order,
                           const std::optional<GaussianEnvelope>& envelope) {
  const GaussianEnvelope m_part{Point(static_cast<std::size_t>(motion.d), 0.0),
                                motion.reference_sign() * motion.c};
  if (!envelope) {
    if (!motion.reference_is_probability()) {
      throw DomainError(
          "integral against the infinite reference measure needs a declared dominating Gaussian");
    }
    const Point origin(static_cast<std::size_t>(motion.d), 0.0);
    return gaussian_expectation(g, origin, 1.0 / std::sqrt(2.0 * motion.c), order);
  }
  GaussianEnvelope env = *envelope;
  env.center.resize(static_cast<std::size_t>(motion.d), 0.0);
  const GaussianEnvelope joint = combine(env, m_part);
  if (!(joint.rate > 0.0)) {
    throw DomainError("declared envelope does not dominate the reference density");
  }
  return integrate_lebesgue(
      [&](std::span<const double> y) { return g(y) * motion.reference_density(y); }, joint, order);
}

ValidationReport validate_assumption1(const SpatialMotion& motion, std::span<const double> t_grid,
                                      const QuadratureSpec& quad) {
  ValidationReport report;
  report.subject = "assumption1:" + motion.name();
  if (t_grid.empty()) {
    report.incomplete = true;
    return report;
  }
  const auto dim = static_cast<std::size_t>(motion.d);
  std::vector<Point> probes;
  for (double r : {0.0, 0.5, -1.5, 2.5}) {
    Point x(dim, 0.0);
    x[0] = r;
    probes.push_back(x);
  }

  bool any_l2 = false;
  std::ostringstream l2_detail;
  for (double t : t_grid) {
    if (!(t > 0.0)) {
      report.add("grid-time-positive", false, "non-positive time in grid", t);
      continue;
    }
    std::ostringstream tag;
    tag << "t=" << t;

    // (a) mass bound
    double worst_mass = 0.0;
    for (const auto& x : probes) {
      const double mass = integrate_reference(
          motion, [&](std::span<const double> y) { return transition_density(motion, t, y, x); },
          quad.order, start_point_envelope(motion, t, x));
      worst_mass = std::max(worst_mass, mass);
    }
    report.add("a:mass-bound:" + tag.str(), worst_mass <= 1.0 + 1e-9,
               "max_x int p(t,y,x) m(dy)", worst_mass);

    // (b) continuity and L^1(m)
    bool finite = true;
    double worst_jump = 0.0;
    for (const auto& x : probes) {
      const double v = a_t_diag(motion, t, x);
      Point xh = x;
      xh[0] += 1e-7;
      const double vh = a_t_diag(motion, t, xh);
      finite = finite && std::isfinite(v) && v > 0.0;
      worst_jump = std::max(worst_jump, std::abs(vh - v) / v);
    }
    report.add("b:a_t-finite-continuous:" + tag.str(), finite && worst_jump < 1e-5,
               "max relative change under 1e-7 shift", worst_jump);

    const double growth = a_t_growth(motion, t);
    double l1 = std::numeric_limits<double>::infinity();
    try {
      l1 = integrate_reference(
          motion, [&](std::span<const double> x) { return a_t_diag(motion, t, x); }, quad.order,
          GaussianEnvelope{Point(dim, 0.0), -growth});
    } catch (const DomainError&) {
    }
    report.add("b:a_t-L1:" + tag.str(), std::isfinite(l1), "int a_t dm", l1);

    // (c) square integrability; divergence is detected as the absence of a
    // dominating Gaussian for a_t^2 m.
    double l2 = std::numeric_limits<double>::infinity();
    try {
      l2 = integrate_reference(
          motion,
          [&](std::span<const double> x) {
            const double a = a_t_diag(motion, t, x);
            return a * a;
          },
          quad.order, GaussianEnvelope{Point(dim, 0.0), -2.0 * growth});
    } catch (const DomainError&) {
    }
    l2_detail << tag.str() << ":" << l2 << " ";
    if (std::isfinite(l2)) any_l2 = true;
    report.add("c:a_t-L2-value:" + tag.str(), true, "int a_t^2 dm (inf = divergent)", l2);
  }
  report.add("c:exists-t0-with-a_t-in-L2", any_l2, l2_detail.str());
  return report;
}

}  // namespace superlab
