// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "superlab/errors.hpp"
#include "superlab/rng.hpp"
#include "superlab/spatial.hpp"
#include "superlab/statistics.hpp"

using namespace superlab;

namespace {

const SpatialMotion kInward{MotionKind::InwardOU, 1.0, 1};
const SpatialMotion kOutward{MotionKind::OutwardOU, 1.0, 1};

// OU law written out from the SDE dX = -+c X dt + dW.
double ou_mean(const SpatialMotion& m, double x, double t) {
  return m.kind == MotionKind::InwardOU ? x * std::exp(-m.c * t) : x * std::exp(m.c * t);
}
double ou_var(const SpatialMotion& m, double t) {
  return m.kind == MotionKind::InwardOU ? (1.0 - std::exp(-2 * m.c * t)) / (2 * m.c)
                                        : (std::exp(2 * m.c * t) - 1.0) / (2 * m.c);
}

// Trapezoid rule on a wide uniform grid; spectrally accurate for the smooth,
// rapidly decaying integrands used here.
template <class F>
double trapezoid(F f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) s += f(lo + i * h);
  return s * h;
}

SampleSummary draw(const SpatialMotion& m, double x, double t, int n, std::uint64_t seed) {
  PathRng rng(seed, 0);
  std::vector<double> xs(static_cast<std::size_t>(n));
  const Point x0{x};
  for (auto& v : xs) v = sample_transition(m, x0, t, rng)[0];
  return summarize(xs);
}

}  // namespace

TEST_CASE("inward samples at large t follow the stationary law") {
  const auto s = draw(kInward, 0.0, 20.0, 100000, 1);
  CHECK(std::abs(s.mean) <= 3 * s.se_mean);
  CHECK(std::abs(s.variance - 0.5) <= 3 * s.se_variance);
}

TEST_CASE("inward samples at small t concentrate at the start") {
  const auto s = draw(kInward, 1.7, 1e-8, 1000, 2);
  CHECK(s.mean == doctest::Approx(1.7).epsilon(1e-6));
  CHECK(s.variance < 1e-7);
}

TEST_CASE("outward variance at t = 1") {
  const auto s = draw(kOutward, 0.0, 1.0, 100000, 3);
  const double target = (std::exp(2.0) - 1.0) / 2.0;
  CHECK(target == doctest::Approx(3.1945).epsilon(1e-4));
  CHECK(std::abs(s.variance - target) <= 3 * s.se_variance);
  CHECK(std::abs(s.mean) <= 3 * s.se_mean);
}

TEST_CASE("KS rejection rate of raw normals is nominal") {
  int rejected = 0;
  const int streams = 200;
  for (int s = 0; s < streams; ++s) {
    PathRng rng(23, static_cast<std::uint64_t>(s));
    std::vector<double> xs(5000);
    for (auto& v : xs) v = rng.normal();
    const double d = ks_statistic(xs, [](double y) { return 0.5 * std::erfc(-y / std::sqrt(2.0)); });
    if (d > ks_critical_1pct(xs.size())) ++rejected;
  }
  // Binomial(200, 0.01): P(X > 6) < 0.5%.
  CHECK(rejected <= 6);
}

TEST_CASE("samples pass a KS test against the OU law") {
  std::uint64_t stream = 0;
  for (const auto& m : {kInward, kOutward}) {
    for (double x : {-1.0, 0.0, 2.0}) {
      const double t = 0.7;
      PathRng rng(17, 100 + stream++);
      std::vector<double> xs(20000);
      for (auto& v : xs) v = sample_transition(m, Point{x}, t, rng)[0];
      const double mu = ou_mean(m, x, t);
      const double sd = std::sqrt(ou_var(m, t));
      const double d = ks_statistic(xs, [&](double y) { return 0.5 * std::erfc(-(y - mu) / (sd * std::sqrt(2.0))); });
      CHECK(d < ks_critical_1pct(xs.size()));
    }
  }
}

TEST_CASE("multi-dimensional draws have independent coordinates") {
  const SpatialMotion m{MotionKind::InwardOU, 0.5, 3};
  PathRng rng(5, 0);
  const Point x{1.0, -1.0, 0.0};
  std::vector<double> prod;
  std::vector<double> c2;
  for (int i = 0; i < 50000; ++i) {
    const auto y = sample_transition(m, x, 1.0, rng);
    prod.push_back((y[0] - ou_mean(m, 1.0, 1.0)) * (y[1] - ou_mean(m, -1.0, 1.0)));
    c2.push_back(y[2]);
  }
  const auto sp = summarize(prod);
  CHECK(std::abs(sp.mean) <= 3 * sp.se_mean);
  const auto s2 = summarize(c2);
  CHECK(std::abs(s2.variance - ou_var(m, 1.0)) <= 3 * s2.se_variance);
}

TEST_CASE("inward transition density at the origin") {
  const Point z{0.0};
  CHECK(transition_density(kInward, 1.0, z, z) ==
        doctest::Approx(std::sqrt(1.0 / (1.0 - std::exp(-2.0)))).epsilon(1e-12));
  CHECK(transition_density(kInward, 1.0, z, z) == doctest::Approx(1.07541).epsilon(1e-5));
}

TEST_CASE("inward density tends to one as t grows") {
  for (double x : {-2.0, 0.0, 1.5}) {
    for (double y : {-1.0, 0.3, 2.0}) {
      CHECK(transition_density(kInward, 40.0, Point{x}, Point{y}) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("densities are symmetric") {
  PathRng rng(9, 0);
  for (const auto& m : {kInward, kOutward, SpatialMotion{MotionKind::OutwardOU, 0.6, 2}}) {
    for (int i = 0; i < 200; ++i) {
      Point x(static_cast<std::size_t>(m.d));
      Point y(static_cast<std::size_t>(m.d));
      for (auto& v : x) v = rng.normal();
      for (auto& v : y) v = rng.normal();
      const double t = 0.1 + rng.uniform();
      CHECK(transition_density(m, t, x, y) == doctest::Approx(transition_density(m, t, y, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("density times m is the OU law") {
  for (const auto& m : {kInward, kOutward}) {
    const double x = 0.8;
    const double t = 0.6;
    const double mu = ou_mean(m, x, t);
    const double v = ou_var(m, t);
    for (double y : {-1.0, 0.0, 0.5, 2.0}) {
      const double lebesgue = std::exp(-(y - mu) * (y - mu) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
      CHECK(transition_density(m, t, Point{x}, Point{y}) * m.reference_density(Point{y}) ==
            doctest::Approx(lebesgue).epsilon(1e-12));
    }
  }
}

TEST_CASE("a_t is p(2t, x, x)") {
  CHECK(a_t_diag(kInward, 0.5, Point{0.0}) == doctest::Approx(1.07541).epsilon(1e-5));
  double prev = INFINITY;
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const double v = a_t_diag(kOutward, t, Point{0.0});
    CHECK(std::isfinite(v));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("a_t matches the integral of the squared kernel") {
  for (const auto& m : {kInward, kOutward}) {
    for (double x : {0.0, 0.7}) {
      const double t = 0.8;
      const Point xp{x};
      const double direct = trapezoid(
          [&](double y) {
            const Point yp{y};
            const double p = transition_density(m, t, xp, yp);
            return p * p * m.reference_density(yp);
          },
          -15.0, 15.0, 6000);
      CHECK(a_t_diag(m, t, xp) == doctest::Approx(direct).epsilon(1e-9));
      CHECK(a_hat_t_diag(m, t, xp) == doctest::Approx(direct).epsilon(1e-9));
    }
  }
}

TEST_CASE("Chapman-Kolmogorov by quadrature") {
  const double t = 0.4;
  const double s = 0.9;
  for (double x : {-0.5, 0.0, 1.2}) {
    for (double y : {-1.0, 0.3}) {
      const Point xp{x};
      const Point yp{y};
      const double lhs = integrate_reference(
          kInward, [&](std::span<const double> z) { return transition_density(kInward, t, xp, z) * transition_density(kInward, s, z, yp); },
          64);
      CHECK(lhs == doctest::Approx(transition_density(kInward, t + s, xp, yp)).epsilon(1e-8));

      const double lhs_out = trapezoid(
          [&](double z) {
            const Point zp{z};
            return transition_density(kOutward, t, xp, zp) * transition_density(kOutward, s, zp, yp) *
                   kOutward.reference_density(zp);
          },
          -20.0, 20.0, 8000);
      CHECK(lhs_out == doctest::Approx(transition_density(kOutward, t + s, xp, yp)).epsilon(1e-8));
    }
  }
}

TEST_CASE("reference measure normalisation") {
  const double mass = trapezoid([](double y) { return kInward.reference_density(Point{y}); }, -12, 12, 4000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate_reference(kInward, [](std::span<const double>) { return 1.0; }, 32) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("kernel integrability checks") {
  const QuadratureSpec quad;
  const std::vector<double> inward_grid{0.5, 1.0, 2.0};
  const auto r = validate_assumption1(kInward, inward_grid, quad);
  CHECK(r.passed());
  const std::vector<double> one{1.0};
  CHECK(validate_assumption1(kOutward, one, quad).passed());
  const auto empty = validate_assumption1(kInward, {}, quad);
  CHECK(empty.entries.empty());
  CHECK(empty.incomplete);
  CHECK_FALSE(empty.passed());
}

TEST_CASE("invalid motion parameters") {
  CHECK_THROWS_AS((SpatialMotion{MotionKind::InwardOU, 0.0, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((SpatialMotion{MotionKind::InwardOU, 1.0, 0}.validate()), ConfigError);
}
