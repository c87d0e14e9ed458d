// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/semigroup.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "superlab/errors.hpp"

namespace superlab {

namespace {

constexpr double kOdeTolerance = 1e-10;

void require_nonnegative_time(double t, const char* what) {
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << what << ": time must be nonnegative, got " << t;
    throw DomainError(os.str());
  }
}

Point mean_point(const SpatialMotion& motion, double t, std::span<const double> x) {
  const double f = motion.mean_factor(t);
  Point m(x.begin(), x.end());
  for (auto& v : m) v *= f;
  return m;
}

double growth_rate(const ModelSpec& spec) {
  return constant_alpha(spec);
}

}  // namespace

double constant_alpha(const ModelSpec& spec) {
  const auto alpha = spec.branching.alpha_field().constant_value();
  if (!alpha) {
    throw UnsupportedModelError("mean oracles need constant alpha = beta*a (use the h-transform "
                                "route for varying alpha); model " +
                                spec.name);
  }
  return *alpha;
}

GaussianEnvelope propagate_envelope(const SpatialMotion& motion, double t,
                                    const GaussianEnvelope& env) {
  if (t <= 0.0) return env;
  const double theta = motion.mean_factor(t);
  const double v = motion.variance(t);
  GaussianEnvelope out;
  out.rate = env.rate * theta * theta / (1.0 + 2.0 * env.rate * v);
  for (double c : env.center) out.center.push_back(c / theta);
  return out;
}

double transition_expectation(const SpatialMotion& motion, double t, const PointFunction& g,
                              std::span<const double> x, int order,
                              const std::optional<GaussianEnvelope>& env) {
  require_nonnegative_time(t, "transition_expectation");
  if (t == 0.0) return g(x);
  const Point m = mean_point(motion, t, x);
  const double sd = std::sqrt(motion.variance(t));
  if (env && env->rate > 0.0) return gaussian_expectation(g, m, sd, *env, order);
  return gaussian_expectation(g, m, sd, order);
}

double mean_semigroup(const ModelSpec& spec, double t, const TestFunction& f,
                      std::span<const double> x, const QuadratureSpec& quad) {
  require_nonnegative_time(t, "mean_semigroup");
  const double alpha = constant_alpha(spec);
  if (t == 0.0) return f(x);
  const Point m = mean_point(spec.spatial, t, x);
  return std::exp(alpha * t) * f.gaussian_expectation(m, std::sqrt(spec.spatial.variance(t)), quad.order);
}

double variance_oracle(const ModelSpec& spec, double t, const TestFunction& f,
                       std::span<const double> x, const QuadratureSpec& quad) {
  require_nonnegative_time(t, "variance_oracle");
  const double alpha = constant_alpha(spec);
  if (t == 0.0) return 0.0;
  const auto& motion = spec.spatial;
  const auto& mech = spec.branching;
  const auto bp = graded_breakpoints(t, quad.time_panels);
  const auto rule = composite_legendre(bp, quad.time_order);
  const auto f_env = f.envelope();

  double total = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = rule.nodes[i];
    const double tau = t - s;
    const PointFunction inner = [&](std::span<const double> y) {
      const double mean = mean_semigroup(spec, tau, f, y, quad);
      return big_a_of(mech, y) * mean * mean;
    };
    std::optional<GaussianEnvelope> env;
    if (f_env) {
      auto prop = propagate_envelope(motion, tau, *f_env);
      prop.rate *= 2.0;
      env = prop;
    }
    const double term =
        std::exp(alpha * s) * transition_expectation(motion, s, inner, x, quad.order, env);
    total += rule.weights[i] * term;
    scale += rule.weights[i] * std::abs(term);
  }
  if (total < -quad.tolerance * std::max(scale, 1.0) * 1e3) {
    std::ostringstream os;
    os << "variance oracle returned a negative value " << total;
    throw NumericalError(os.str());
  }
  return std::max(total, 0.0);
}

double resolvent_horizon(double q, double growth, const QuadratureSpec& quad) {
  if (quad.horizon > 0.0) return quad.horizon;
  return std::log(1.0 / quad.tolerance) / (q - growth);
}

double laplace_transform_mean(const ModelSpec& spec, double q, const TestFunction& f,
                              std::span<const double> x, const QuadratureSpec& quad) {
  const double alpha = growth_rate(spec);
  if (!(q > alpha)) {
    std::ostringstream os;
    os << "Laplace transform of the mean needs q > alpha; q=" << q << ", alpha=" << alpha;
    throw DomainError(os.str());
  }
  const double horizon = resolvent_horizon(q, alpha, quad);
  const int panels = std::max(quad.time_panels, 2);
  std::vector<double> bp;
  // Geometric panels toward s = 0 resolve the short-time behaviour of rough f.
  for (int i = 0; i < 8; ++i) bp.push_back(horizon / panels * std::ldexp(1.0, i - 8));
  bp.insert(bp.begin(), 0.0);
  for (int i = 1; i <= panels; ++i) bp.push_back(horizon * i / panels);
  const auto rule = composite_legendre(bp, quad.time_order);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = rule.nodes[i];
    total += rule.weights[i] * std::exp(-q * s) * mean_semigroup(spec, s, f, x, quad);
  }
  return total;
}

double resolvent(const ModelSpec& spec, double q, const TestFunction& f, std::span<const double> x,
                 const QuadratureSpec& quad) {
  const double k = k_bound(spec.branching);
  double lambda0 = growth_rate(spec);
  try {
    lambda0 = registry_lookup(spec).lambda0;
  } catch (const NoSpectralDataError&) {
  }
  if (!(q > std::max(k, lambda0))) {
    std::ostringstream os;
    os << "resolvent needs q > max{K, lambda0}; q=" << q << ", K=" << k << ", lambda0=" << lambda0;
    throw DomainError(os.str());
  }
  return laplace_transform_mean(spec, q, f, x, quad);
}

std::optional<GaussianEnvelope> resolvent_envelope(const SpatialMotion& motion,
                                                   const TestFunction& f) {
  const auto env = f.envelope();
  if (!env || motion.kind == MotionKind::InwardOU) return std::nullopt;
  // Outward: the propagated rate moves monotonically from env.rate to c.
  bool centred = true;
  for (double c : env->center) centred = centred && c == 0.0;
  const double rate = std::min(env->rate, motion.c);
  return GaussianEnvelope{Point(static_cast<std::size_t>(motion.d), 0.0), centred ? rate : 0.5 * rate};
}

double pairing_with_phi0_hat(const ModelSpec& spec, const SpectralData& sd, const PointFunction& g,
                             const std::optional<GaussianEnvelope>& g_envelope,
                             const QuadratureSpec& quad) {
  const auto hat_env = sd.phi0_hat.envelope();
  std::optional<GaussianEnvelope> env;
  if (hat_env && g_envelope) {
    env = combine(*hat_env, *g_envelope);
  } else if (hat_env) {
    env = hat_env;
  } else {
    env = g_envelope;
  }
  return integrate_reference(
      spec.spatial, [&](std::span<const double> y) { return g(y) * sd.phi0_hat(y); }, quad.order,
      env);
}

double pairing_with_phi0_hat(const ModelSpec& spec, const SpectralData& sd, const TestFunction& f,
                             const QuadratureSpec& quad) {
  // m is N(0, 1/(2c)) per axis here, so the closed forms of the family apply
  // (balls in particular, which quadrature resolves poorly).
  if (spec.spatial.kind == MotionKind::InwardOU) {
    const Point origin(static_cast<std::size_t>(spec.spatial.d), 0.0);
    return TestFunction::product(f, sd.phi0_hat)
        .gaussian_expectation(origin, std::sqrt(0.5 / spec.spatial.c), quad.order);
  }
  return pairing_with_phi0_hat(
      spec, sd, [&](std::span<const double> y) { return f(y); }, f.envelope(), quad);
}

double h_semigroup(const ModelSpec& spec, double t, const TestFunction& f,
                   std::span<const double> x, const QuadratureSpec& quad) {
  require_nonnegative_time(t, "h_semigroup");
  const auto sd = registry_lookup(spec);
  if (t == 0.0) return f(x);
  const auto weighted = TestFunction::product(f, sd.phi0);
  return std::exp(-sd.lambda0 * t) * mean_semigroup(spec, t, weighted, x, quad) / sd.phi0(x);
}

double original_mean_semigroup(const ModelSpec& spec, double t, const TestFunction& f,
                               std::span<const double> x, const QuadratureSpec& quad) {
  if (!spec.htransform) {
    throw UnsupportedModelError("model " + spec.name + " carries no h-transform link");
  }
  const auto& h = spec.htransform->h;
  const auto& terms = h.terms();
  if (terms.size() != 1 || !terms[0].powers.empty()) {
    throw UnsupportedModelError("h must be a single centred Gaussian factor");
  }
  const auto dim = static_cast<std::size_t>(spec.spatial.d);
  const auto inv_h = TestFunction::gaussian(1.0 / terms[0].coef, -terms[0].rate, Point(dim, 0.0));
  return h(x) * mean_semigroup(spec, t, TestFunction::product(f, inv_h), x, quad);
}

FellerResult feller_check(const ModelSpec& spec, const TestFunction& f,
                          std::span<const double> t_sequence, std::span<const Point> grid,
                          const QuadratureSpec& quad) {
  if (!f.is_c0()) {
    throw DomainError("feller_check needs a function flagged C_0; got " + f.name());
  }
  FellerResult out;
  for (const auto& x : grid) out.sup_f = std::max(out.sup_f, std::abs(f(x)));
  for (double t : t_sequence) {
    double gap = 0.0;
    for (const auto& x : grid) gap = std::max(gap, std::abs(h_semigroup(spec, t, f, x, quad) - f(x)));
    out.times.push_back(t);
    out.gaps.push_back(gap);
  }
  out.monotone = true;
  bool all_zero = true;
  for (std::size_t i = 0; i < out.gaps.size(); ++i) {
    all_zero = all_zero && out.gaps[i] == 0.0;
    if (i > 0 && !(out.gaps[i] < out.gaps[i - 1])) out.monotone = false;
  }
  if (all_zero) out.monotone = true;
  return out;
}

namespace {

using OdeState = std::array<double, 1>;

double integrate_log_laplace(const ModelSpec& spec, double u0, double t0, double t1) {
  const Point origin(static_cast<std::size_t>(spec.spatial.d), 0.0);
  const double beta = spec.branching.beta(origin);
  const auto rhs = [&](const OdeState& u, OdeState& du, double) {
    du[0] = -beta * psi_eval(spec.branching, origin, std::max(u[0], 0.0));
  };
  namespace odeint = boost::numeric::odeint;
  OdeState state{u0};
  auto stepper = odeint::make_controlled(kOdeTolerance, kOdeTolerance,
                                         odeint::runge_kutta_dopri5<OdeState>());
  const double dt = std::min(1e-3, t1 - t0) / (1.0 + u0);
  odeint::integrate_adaptive(stepper, rhs, state, t0, t1, dt);
  return state[0];
}

void require_homogeneous(const ModelSpec& spec, const char* what) {
  if (!spec.branching.is_homogeneous()) {
    throw UnsupportedModelError(std::string(what) + " needs spatially homogeneous branching");
  }
}

}  // namespace

double log_laplace_ode(const ModelSpec& spec, double theta, double t) {
  require_homogeneous(spec, "log_laplace_ode");
  if (theta < 0.0) throw DomainError("log_laplace_ode needs theta >= 0");
  require_nonnegative_time(t, "log_laplace_ode");
  if (theta == 0.0 || t == 0.0) return theta;
  return integrate_log_laplace(spec, theta, 0.0, t);
}

double logistic_log_laplace(double a, double b, double beta, double theta, double t) {
  if (a == 0.0) return theta / (1.0 + b * beta * theta * t);
  const double g = std::exp(a * beta * t);
  return a * theta * g / (a + b * theta * (g - 1.0));
}

ExtinctionResult extinction_probability(const ModelSpec& spec) {
  require_homogeneous(spec, "extinction_probability");
  const auto& mech = spec.branching;
  const double a = *mech.a.constant_value();
  const double b = *mech.b.constant_value();
  const double beta = *mech.beta.constant_value();
  ExtinctionResult out;
  if (mech.atoms.empty()) {
    if (beta == 0.0 || b == 0.0) {
      out.probability = 0.0;
      out.deterministic = true;
      out.method = "deterministic mass (no branching noise)";
      return out;
    }
    out.probability = a <= 0.0 ? 1.0 : std::exp(-a / b);
    out.method = "closed form exp(-a/b)";
    return out;
  }
  // u_inf is the limit of u_theta(t) with theta large and t to infinity.
  double u = 1e6;
  double t = 0.0;
  for (int chunk = 0; chunk < 100000; ++chunk) {
    const double next = integrate_log_laplace(spec, u, t, t + 1.0);
    t += 1.0;
    const bool stationary = std::abs(next - u) < 1e-8;
    u = next;
    if (stationary) break;
  }
  out.probability = std::exp(-u);
  out.method = "log-Laplace ODE limit from theta=1e6";
  return out;
}

}  // namespace superlab
