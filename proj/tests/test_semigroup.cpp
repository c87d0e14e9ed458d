// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "superlab/errors.hpp"
#include "superlab/rng.hpp"
#include "superlab/semigroup.hpp"

using namespace superlab;

namespace {

const QuadratureSpec kQuad;

ModelSpec inward(double beta = 1.0, double a = 1.0, double b = 1.0) {
  PresetParams p;
  p.beta = beta;
  p.a = a;
  p.b = b;
  return model_preset("inward-ou", p);
}

ModelSpec outward(double beta = 3.0) {
  PresetParams p;
  p.beta = beta;
  return model_preset("outward-ou", p);
}

ModelSpec htransform() {
  PresetParams p;
  p.c = 3.0;
  p.c1 = 2.0;
  p.c2 = 1.0;
  return model_preset("htransform-ou", p);
}

// E[amp exp(-rate (m + s Z)^2)], Z standard normal.
double gauss_expect(double amp, double rate, double m, double s2) {
  const double k = 1.0 + 2.0 * rate * s2;
  return amp / std::sqrt(k) * std::exp(-rate * m * m / k);
}

// Composite Simpson on [0, t].
double simpson(const std::function<double(double)>& f, double t, int n = 2000) {
  const double h = t / n;
  double s = f(0.0) + f(t);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

// Classical RK4 for a small system.
template <std::size_t N, class F>
std::array<double, N> rk4(F rhs, std::array<double, N> y, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    auto add = [](std::array<double, N> a, const std::array<double, N>& b, double s) {
      for (std::size_t k = 0; k < N; ++k) a[k] += s * b[k];
      return a;
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs(add(y, k1, h / 2));
    const auto k3 = rhs(add(y, k2, h / 2));
    const auto k4 = rhs(add(y, k3, h));
    for (std::size_t k = 0; k < N; ++k) y[k] += h / 6 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
  }
  return y;
}

}  // namespace

TEST_CASE("mean of total mass grows like e^t") {
  const auto spec = inward();
  for (double t : {0.3, 1.0, 2.5}) {
    for (double x : {-1.0, 0.0, 2.0}) {
      CHECK(mean_semigroup(spec, t, TestFunction::constant(1.0), Point{x}, kQuad) ==
            doctest::Approx(std::exp(t)).epsilon(1e-13));
    }
  }
}

TEST_CASE("phi0 is an eigenfunction of the mean semigroup") {
  PathRng rng(4, 0);
  for (const auto& spec : {inward(0.5), inward(1.0), outward(3.0)}) {
    const auto sd = registry_lookup(spec);
    for (int i = 0; i < 20; ++i) {
      const double t = 0.05 + 3.0 * rng.uniform();
      const Point x{1.5 * rng.normal()};
      CHECK(mean_semigroup(spec, t, sd.phi0, x, kQuad) ==
            doctest::Approx(std::exp(sd.lambda0 * t) * sd.phi0(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("mean semigroup at t = 0 is the identity") {
  const auto f = TestFunction::gaussian(1.3, 0.7, Point{0.4}) + TestFunction::coordinate(0);
  for (double x : {-1.0, 0.25, 3.0}) {
    CHECK(mean_semigroup(inward(), 0.0, f, Point{x}, kQuad) == f(Point{x}));
  }
}

TEST_CASE("mean of a Gaussian matches the OU closed form") {
  const auto spec = inward();
  const auto f = TestFunction::gaussian(2.0, 0.8, Point{0.0});
  for (double t : {0.2, 1.0, 3.0}) {
    for (double x : {0.0, 1.1}) {
      const double m = x * std::exp(-t);
      const double v = (1 - std::exp(-2 * t)) / 2;
      CHECK(mean_semigroup(spec, t, f, Point{x}, kQuad) ==
            doctest::Approx(std::exp(t) * gauss_expect(2.0, 0.8, m, v)).epsilon(1e-12));
    }
  }
}

TEST_CASE("variance of total mass") {
  const auto spec = inward();
  const double v = variance_oracle(spec, 1.0, TestFunction::constant(1.0), Point{0.0}, kQuad);
  CHECK(v == doctest::Approx(2 * std::exp(2.0) * (1 - std::exp(-1.0))).epsilon(1e-10));
  CHECK(v == doctest::Approx(9.3414).epsilon(1e-4));
  CHECK(variance_oracle(spec, 0.0, TestFunction::constant(1.0), Point{0.0}, kQuad) == 0.0);
}

TEST_CASE("variance of a Gaussian observable against a nested closed-form route") {
  // Var = int_0^t e^{alpha s} A E[(T_{t-s} f)^2(xi_s)] ds; T_u f is a
  // Gaussian in the start point, so the inner expectation is closed form.
  const auto spec = inward();
  const double amp = 1.0;
  const double rate = 1.0;
  const auto f = TestFunction::gaussian(amp, rate, Point{0.0});
  for (double t : {0.5, 2.0}) {
    for (double x : {0.0, 0.9}) {
      const auto integrand = [&](double s) {
        const double u = t - s;
        // T_u f(y) = e^u amp/sqrt(k) exp(-rate e^{-2u} y^2 / k), k = 1 + 2 rate v_u
        const double vu = (1 - std::exp(-2 * u)) / 2;
        const double k = 1 + 2 * rate * vu;
        const double amp_u = std::exp(u) * amp / std::sqrt(k);
        const double rate_u = rate * std::exp(-2 * u) / k;
        const double sq = gauss_expect(amp_u * amp_u, 2 * rate_u, x * std::exp(-s), (1 - std::exp(-2 * s)) / 2);
        return std::exp(s) * 2.0 * sq;
      };
      CHECK(variance_oracle(spec, t, f, Point{x}, kQuad) == doctest::Approx(simpson(integrand, t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("variance is bounded by e^{Kt} T_t(f^2)") {
  PresetParams p;
  p.atoms = {{0.5, 1.0}};
  const auto spec = model_preset("inward-ou", p);
  const double k = k_bound(spec.branching);
  PathRng rng(8, 0);
  const std::vector<TestFunction> fs{TestFunction::constant(1.0), TestFunction::gaussian(1.0, 0.5, Point{0.3}),
                                     TestFunction::ball_indicator(Point{0.0}, 1.0)};
  for (const auto& f : fs) {
    for (int i = 0; i < 4; ++i) {
      const double t = 0.2 + 2.0 * rng.uniform();
      const Point x{rng.normal()};
      const double var = variance_oracle(spec, t, f, x, kQuad);
      const double bound = std::exp(k * t) * mean_semigroup(spec, t, TestFunction::product(f, f), x, kQuad);
      CHECK(var >= 0.0);
      CHECK(var <= bound);
    }
  }
}

TEST_CASE("resolvent of phi0") {
  for (const auto& spec : {inward(0.5), inward(1.0), outward(3.0)}) {
    const auto sd = registry_lookup(spec);
    const double q = k_bound(spec.branching) + 1.0;
    for (double x : {0.0, 0.6, -1.4}) {
      CHECK(resolvent(spec, q, sd.phi0, Point{x}, kQuad) ==
            doctest::Approx(sd.phi0(Point{x}) / (q - sd.lambda0)).epsilon(1e-8));
    }
  }
}

TEST_CASE("Laplace transform of the constant mean") {
  const auto spec = inward();
  CHECK(laplace_transform_mean(spec, 3.0, TestFunction::constant(1.0), Point{0.0}, kQuad) ==
        doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(resolvent(spec, 3.0, TestFunction::constant(1.0), Point{0.0}, kQuad), DomainError);
  CHECK_THROWS_AS(laplace_transform_mean(spec, 1.0, TestFunction::constant(1.0), Point{0.0}, kQuad), DomainError);
}

TEST_CASE("pairing of the resolvent with phi0_hat") {
  const auto g = TestFunction::gaussian(1.0, 1.0, Point{0.2});
  for (const auto& spec : {inward(1.0), outward(3.0)}) {
    const auto sd = registry_lookup(spec);
    const double q = k_bound(spec.branching) + 1.0;
    const PointFunction ug = [&](std::span<const double> y) { return resolvent(spec, q, g, y, kQuad); };
    const double lhs = pairing_with_phi0_hat(spec, sd, ug, resolvent_envelope(spec.spatial, g), kQuad);
    const double rhs = pairing_with_phi0_hat(spec, sd, g, kQuad) / (q - sd.lambda0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("normalisation pairings") {
  for (const auto& spec : {inward(1.0), outward(3.0), htransform()}) {
    const auto sd = registry_lookup(spec);
    CHECK(pairing_with_phi0_hat(spec, sd, sd.phi0, kQuad) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("h-semigroup is conservative") {
  for (const auto& spec : {inward(1.0), outward(3.0)}) {
    for (double t : {0.1, 1.0}) {
      CHECK(h_semigroup(spec, t, TestFunction::constant(1.0), Point{0.7}, kQuad) ==
            doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("inward h-semigroup is the OU semigroup") {
  const auto spec = inward();
  const auto f = TestFunction::gaussian(1.0, 0.6, Point{-0.3});
  const PointFunction g = [&](std::span<const double> y) { return f(y); };
  for (double t : {0.3, 1.5}) {
    for (double x : {0.0, 1.0}) {
      CHECK(h_semigroup(spec, t, f, Point{x}, kQuad) ==
            doctest::Approx(transition_expectation(spec.spatial, t, g, Point{x}, 64)).epsilon(1e-10));
    }
  }
}

TEST_CASE("outward h-semigroup is the inward OU semigroup") {
  const auto spec = outward(3.0);
  const SpatialMotion in{MotionKind::InwardOU, spec.spatial.c, 1};
  const auto f = TestFunction::gaussian(1.0, 0.4, Point{0.5});
  for (double t : {0.2, 1.0, 2.0}) {
    for (double x : {-0.8, 0.0, 0.6}) {
      const double m = x * std::exp(-t);
      const double v = (1 - std::exp(-2 * t)) / 2;
      // f centred at 0.5: shift the mean.
      const double k = 1 + 2 * 0.4 * v;
      const double direct = std::exp(-0.4 * (m - 0.5) * (m - 0.5) / k) / std::sqrt(k);
      CHECK(h_semigroup(spec, t, f, Point{x}, kQuad) == doctest::Approx(direct).epsilon(1e-8));
      CHECK(direct == doctest::Approx(transition_expectation(in, t, [&](std::span<const double> y) { return f(y); },
                                                             Point{x}, 64))
                          .epsilon(1e-10));
    }
  }
}

TEST_CASE("Feller gaps shrink for Gaussian observables") {
  std::vector<Point> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(Point{0.25 * i});
  const std::vector<double> ts{0.1, 0.01, 0.001};
  const auto f = TestFunction::gaussian(1.0, 1.0, Point{0.0});
  for (const auto& spec : {inward(1.0), outward(3.0)}) {
    const auto r = feller_check(spec, f, ts, grid, kQuad);
    CHECK(r.monotone);
    CHECK(r.gaps.back() < 0.05 * r.sup_f);
  }
  const auto zero = feller_check(inward(), TestFunction::constant(0.0), ts, grid, kQuad);
  for (double g : zero.gaps) CHECK(g == 0.0);
  CHECK_THROWS_AS(feller_check(inward(), TestFunction::ball_indicator(Point{0.0}, 1.0), ts, grid, kQuad),
                  DomainError);
}

TEST_CASE("log-Laplace ODE") {
  const auto spec = inward();
  CHECK(log_laplace_ode(spec, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(log_laplace_ode(spec, 0.0, 1.0) == 0.0);
  const double e = std::exp(1.0);
  CHECK(log_laplace_ode(spec, 2.0, 1.0) == doctest::Approx(2 * e / (2 * e - 1)).epsilon(1e-9));
  CHECK(logistic_log_laplace(1, 1, 1, 2.0, 1.0) == doctest::Approx(1.2253997).epsilon(1e-7));
  for (double theta : {0.3, 5.0}) {
    for (double t : {0.5, 2.0}) {
      CHECK(log_laplace_ode(inward(2.0, 0.7, 1.3), theta, t) ==
            doctest::Approx(logistic_log_laplace(0.7, 1.3, 2.0, theta, t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("log-Laplace ODE with jumps against RK4") {
  PresetParams p;
  p.atoms = {{0.5, 1.0}, {0.25, 2.0}};
  const auto spec = model_preset("inward-ou", p);
  const auto psi = [](double u) {
    return -u + u * u + 0.5 * (std::exp(-u) - 1 + u) + 0.25 * (std::exp(-2 * u) - 1 + 2 * u);
  };
  const auto y = rk4<1>([&](const std::array<double, 1>& v) { return std::array<double, 1>{-psi(v[0])}; },
                        {1.7}, 1.5, 20000);
  CHECK(log_laplace_ode(spec, 1.7, 1.5) == doctest::Approx(y[0]).epsilon(1e-9));
}

TEST_CASE("extinction probabilities") {
  CHECK(extinction_probability(inward(1, 1, 1)).probability == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(extinction_probability(inward(1, 2, 1)).probability == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(extinction_probability(inward(1, 1e-9, 1)).probability == doctest::Approx(1.0).epsilon(1e-8));
  const auto det = extinction_probability(inward(1, 1, 0));
  CHECK(det.deterministic);
  CHECK(det.probability == 0.0);
}

TEST_CASE("extinction with jumps is exp of the positive root of psi") {
  PresetParams p;
  p.atoms = {{0.5, 1.0}};
  const auto spec = model_preset("inward-ou", p);
  const auto psi = [](double u) { return -u + u * u + 0.5 * (std::exp(-u) - 1 + u); };
  double lo = 1e-6;
  double hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (psi(mid) < 0 ? lo : hi) = mid;
  }
  CHECK(extinction_probability(spec).probability == doctest::Approx(std::exp(-lo)).epsilon(1e-7));
}

TEST_CASE("h-transform map-back agrees with the Riccati solution") {
  // Original model: inward OU with c = 3 and alpha = 2x^2 + 1. For
  // f = exp(A0 x^2), E<f, X_t> = exp(A(t) x^2 + B(t)) with
  // A' = 2A^2 - 2cA + c1, B' = A + c2 in one dimension.
  const auto spec = htransform();
  const double c = 3.0;
  const double c1 = 2.0;
  const double c2 = 1.0;
  for (double a0 : {0.0, -1.0}) {
    const auto f = a0 == 0.0 ? TestFunction::constant(1.0) : TestFunction::gaussian(1.0, -a0, Point{0.0});
    for (double t : {0.25, 1.0, 2.0}) {
      const auto ab = rk4<2>(
          [&](const std::array<double, 2>& v) {
            return std::array<double, 2>{2 * v[0] * v[0] - 2 * c * v[0] + c1, v[0] + c2};
          },
          {a0, 0.0}, t, 4000);
      for (double x : {0.0, 0.5, 1.2}) {
        const double riccati = std::exp(ab[0] * x * x + ab[1]);
        CHECK(original_mean_semigroup(spec, t, f, Point{x}, kQuad) == doctest::Approx(riccati).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("varying alpha is outside the constant-rate oracles") {
  auto spec = inward();
  spec.branching.a = ScalarField::constant(1.0) + ScalarField::gaussian(0.5, 1.0);
  CHECK_THROWS_AS(constant_alpha(spec), UnsupportedModelError);
}
