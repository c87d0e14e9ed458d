// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion, exit 0 only if all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "superlab/config.hpp"
#include "superlab/experiment.hpp"
#include "superlab/runner.hpp"
#include "superlab/spectral.hpp"

using namespace superlab;
namespace fs = std::filesystem;

namespace {

const QuadratureSpec kQuad;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ModelSpec inward(double beta = 1.0) {
  PresetParams p;
  p.beta = beta;
  return model_preset("inward-ou", p);
}

ModelSpec outward() {
  PresetParams p;
  p.beta = 3.0;
  return model_preset("outward-ou", p);
}

ModelSpec htransform() {
  PresetParams p;
  p.c = 3.0;
  p.c1 = 2.0;
  p.c2 = 1.0;
  return model_preset("htransform-ou", p);
}

SimConfig sim(double eps, std::vector<double> times, std::uint64_t seed) {
  SimConfig cfg;
  cfg.epsilon = eps;
  cfg.seed = seed;
  cfg.observation_times = std::move(times);
  return cfg;
}

std::vector<double> column(const std::vector<TrajectoryRecord>& recs, std::size_t k,
                           const std::function<double(const ObservationRow&)>& get) {
  std::vector<double> v;
  v.reserve(recs.size());
  for (const auto& r : recs) v.push_back(get(r.rows[k]));
  return v;
}

Outcome criterion1() {
  struct Case {
    std::string name;
    ModelSpec spec;
  };
  const std::vector<Case> cases{{"inward beta=0.5", inward(0.5)},
                                {"inward beta=1", inward(1.0)},
                                {"outward beta=3", outward()},
                                {"htransform c=3", htransform()}};
  const double tol = 1e-8;
  double worst = 0.0;
  std::string worst_at;
  auto note = [&](double err, const std::string& where) {
    if (!(err <= worst)) {
      worst = err;
      worst_at = where;
    }
  };
  double lambda_c = 0.0;
  for (const auto& c : cases) {
    const auto sd = registry_lookup(c.spec);
    if (c.spec.htransform) lambda_c = sd.lambda0;
    const double q = k_bound(c.spec.branching) + 1.0;
    const auto g = TestFunction::gaussian(1.0, 1.0, Point{0.2});
    for (double x : {-1.5, -0.3, 0.0, 0.8, 2.0}) {
      const Point xp{x};
      for (double t : {0.5, 1.0, 2.0}) {
        note(rel(mean_semigroup(c.spec, t, sd.phi0, xp, kQuad), std::exp(sd.lambda0 * t) * sd.phi0(xp)),
             c.name + " T_t phi0");
      }
      note(rel(resolvent(c.spec, q, sd.phi0, xp, kQuad), sd.phi0(xp) / (q - sd.lambda0)), c.name + " U_q phi0");
    }
    const PointFunction ug = [&](std::span<const double> y) { return resolvent(c.spec, q, g, y, kQuad); };
    const double lhs = pairing_with_phi0_hat(c.spec, sd, ug, resolvent_envelope(c.spec.spatial, g), kQuad);
    note(rel(lhs, pairing_with_phi0_hat(c.spec, sd, g, kQuad) / (q - sd.lambda0)), c.name + " <U_q f, phi0_hat>");
    note(rel(pairing_with_phi0_hat(c.spec, sd, sd.phi0, kQuad), 1.0), c.name + " <phi0, phi0_hat>");
    const auto sq = TestFunction::product(sd.phi0, sd.phi0);
    const double n2 = integrate_reference(
        c.spec.spatial, [&](std::span<const double> y) { return sq(y); }, kQuad.order, sq.envelope());
    note(rel(n2, 1.0), c.name + " ||phi0||_2");
  }
  const bool lc_ok = std::abs(lambda_c - 1.38197) < 5e-6;
  return {worst <= tol && lc_ok,
          fmt("max rel err %.2e at %s (tol 1e-8); lambda_c=%.6f", worst, worst_at.c_str(), lambda_c)};
}

Outcome criterion2() {
  const auto spec = inward();
  const auto sd = registry_lookup(spec);
  const std::vector<double> times{0.5, 1.0, 2.0};
  const std::vector<TestFunction> mass{TestFunction::constant(1.0).with_name("mass")};
  // Sum over times of relative errors of the mean and variance.
  auto score = [&](double eps, std::uint64_t seed, bool& ok, std::string& detail) {
    const auto recs = run_paths(spec, sim(eps, times, seed), mass, sd, 5000);
    double total = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double t = times[k];
      const auto s = summarize(column(recs, k, [](const ObservationRow& r) { return r.values[0]; }));
      const double m = std::exp(t);
      const double v = 2.0 * std::exp(2.0 * t) * (1.0 - std::exp(-t));
      const double z = (s.mean - m) / s.se_mean;
      const double rv = rel(s.variance, v);
      ok = ok && std::abs(z) <= 3.0 && rv <= 0.10;
      detail += fmt(" t=%g: mean %.4f (z=%.2f) var %.3f vs %.3f (%.1f%%);", t, s.mean, z, s.variance, v, 100 * rv);
      total += rel(s.mean, m) + rv;
    }
    return total;
  };
  bool ok01 = true;
  bool ok05 = true;
  std::string d01;
  std::string d05;
  const double b01 = score(0.01, 2001, ok01, d01);
  const double b05 = score(0.05, 2002, ok05, d05);
  const bool decreases = b01 < b05;
  return {ok01 && decreases, "eps=0.01" + d01 + fmt(" error score eps=0.05 %.4f -> eps=0.01 %.4f (%s)", b05, b01,
                                                    decreases ? "decreases" : "does not decrease")};
}

Outcome criterion3() {
  const auto spec = inward();
  const auto sd = registry_lookup(spec);
  const auto recs = run_paths(spec, sim(0.01, {1.0}, 3001), {TestFunction::constant(1.0)}, sd, 5000);
  const auto s = summarize(column(recs, 0, [](const ObservationRow& r) { return std::exp(-2.0 * r.values[0]); }));
  const double u = log_laplace_ode(spec, 2.0, 1.0);
  const double target = std::exp(-u);
  const double z = (s.mean - target) / s.se_mean;
  const double z_printed = (s.mean - std::exp(-1.23255)) / s.se_mean;
  return {std::abs(z) <= 3.0, fmt("E exp(-2<1,X_1>) = %.5f +- %.5f; ODE u=%.5f target %.5f (z=%.2f); "
                                  "printed u=1.23255 target %.5f (z=%.2f)",
                                  s.mean, s.se_mean, u, target, z, std::exp(-1.23255), z_printed)};
}

Outcome criterion4() {
  const auto spec = inward();
  const auto sd = registry_lookup(spec);
  const auto rep = run_martingale_test(spec, sim(0.01, {1.0, 2.0, 4.0, 8.0}, 4001), sd, 5000, kQuad);
  std::string d;
  for (const auto& r : rep.rows) d += fmt(" E W_%g=%.4f (z=%.2f);", r.t, r.w.mean, r.z_w);
  const auto& last = rep.rows.back();
  d += fmt(" E W_8^2=%.4f vs %.5f (z=%.2f); survival %.4f vs %.5f (z=%.2f)", last.w2.mean, last.w2_oracle,
           last.z_w2, rep.survival_fraction, rep.survival_target, rep.z_survival);
  const bool oracle_ok = std::abs(last.w2_oracle - 2.99933) < 5e-6 && std::abs(rep.survival_target - 0.63212) < 5e-6;
  return {rep.passed && oracle_ok, d};
}

struct SllnRun {
  SllnReport report;
  double ball_target = 0.0;
  double resolvent_target = 0.0;
  double resolvent_closed = 0.0;
};

SllnRun slln_run() {
  const auto spec = inward();
  const auto sd = registry_lookup(spec);
  const auto ball = TestFunction::ball_indicator(Point{0.0}, 1.0).with_name("ball");
  // q = 3 equals K here, so U_q g is the Laplace transform of the mean (convergent for q > alpha).
  const auto tab = tabulate_resolvent(spec, sd, 3.0, TestFunction::gaussian(1.0, 1.0, Point{0.0}), kQuad);
  const auto res = tab.f.with_name("resolvent");
  SllnRun out;
  out.ball_target = slln_targets(spec, sd, {ball}, kQuad)[0].target;
  out.resolvent_target = tab.target_quadrature;
  out.resolvent_closed = tab.target;
  const auto recs = run_paths(spec, sim(0.01, {2.0, 4.0, 6.0, 8.0}, 5001), {ball, res}, sd, 2000);
  out.report = slln_report(sd, recs, {{ball, out.ball_target, "closed form"}, {res, out.resolvent_target, "quadrature"}},
                           2.0);
  return out;
}

const SllnCell& cell(const SllnReport& r, const std::string& name, double t) {
  for (const auto& c : r.cells) {
    if (c.observable == name && c.t == t) return c;
  }
  throw std::runtime_error("no SLLN cell for " + name);
}

Outcome criterion5(const SllnRun& run) {
  const auto& c8 = cell(run.report, "ball", 8.0);
  const auto& c2 = cell(run.report, "ball", 2.0);
  const double z = (c8.ratio.mean - std::erf(1.0)) / c8.ratio.se_mean;
  const bool shrinks = c8.ratio_iqr < c2.ratio_iqr;
  const bool target_ok = std::abs(run.ball_target - std::erf(1.0)) < 1e-10;
  return {std::abs(z) <= 3.0 && shrinks && target_ok && !run.report.degenerate,
          fmt("ratio at t=8 %.5f +- %.5f vs erf(1)=%.5f (z=%.2f) over %zu survivors; IQR t=2 %.4f -> t=8 %.4f",
              c8.ratio.mean, c8.ratio.se_mean, std::erf(1.0), z, run.report.n_surviving, c2.ratio_iqr,
              c8.ratio_iqr)};
}

Outcome criterion6(const SllnRun& run) {
  const auto& c = cell(run.report, "resolvent", 8.0);
  const double z = c.deviation.mean / c.deviation.se_mean;
  return {std::abs(z) <= 3.0,
          fmt("e^{-8}<U_3 g,X_8> = %.5f; target %.6f (closed form %.6f) x mean W_8 %.4f = %.5f; paired z=%.2f",
              c.scaled.mean, run.resolvent_target, run.resolvent_closed, c.w_mean, run.resolvent_target * c.w_mean,
              z)};
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> v;
  for (double t = lo; t <= hi + 1e-12; t += step) v.push_back(t);
  return v;
}

Outcome criterion7() {
  const auto spec = inward();
  const auto sd = registry_lookup(spec);
  const auto ts = grid(1.0, 6.0, 0.5);
  const auto r = gap_decay_slope(spec, sd, TestFunction::gaussian(1.0, 1.0, Point{0.0}), Point{0.5}, ts, kQuad);
  return {r.passed, fmt("slope %.4f vs bound %.2f", r.slope, r.bound)};
}

Outcome criterion8() {
  const auto spec = inward();
  const auto sd = registry_lookup(spec);
  const auto ts = grid(2.0, 6.0, 0.5);
  const auto r = centered_variance_slope(spec, sd, TestFunction::coordinate(0), Point{0.0}, ts, kQuad);
  return {r.passed, fmt("slope %.4f vs bound %.4f", r.slope, r.bound)};
}

Outcome criterion9() {
  const std::vector<double> ts{0.1, 0.01, 0.001};
  std::vector<Point> pts;
  for (double x : grid(-4.0, 4.0, 0.25)) pts.push_back(Point{x});
  bool ok = true;
  std::string d;
  for (const auto& [name, spec] : {std::pair{"inward", inward()}, std::pair{"outward", outward()}}) {
    ExperimentConfig cfg;
    cfg.observables = {"c0"};
    const auto sd = registry_lookup(spec);
    for (const auto& f : build_observables(cfg, spec, &sd).functions) {
      const auto r = feller_check(spec, f, ts, pts, kQuad);
      ok = ok && r.monotone;
      d += fmt(" %s %s: %.2e %.2e %.2e;", name, f.name().c_str(), r.gaps[0], r.gaps[1], r.gaps[2]);
    }
  }
  return {ok, d};
}

Outcome criterion10() {
  const fs::path root = fs::temp_directory_path() / "superlab-acceptance-repro";
  fs::remove_all(root);
  struct Job {
    std::string name;
    const char* json;
  };
  const std::vector<Job> jobs{
      {"moments", R"({"model": {"preset": "inward-ou"}, "sim": {"epsilon": 0.01, "seed": 7},
          "experiment": {"name": "moments", "paths": 300, "observables": ["mass", "gaussian:amp=1,rate=1"]}})"},
      {"martingale", R"({"model": {"preset": "inward-ou"}, "sim": {"epsilon": 0.01, "seed": 8,
          "observation_times": [1, 2, 4]}, "experiment": {"name": "martingale", "paths": 300}})"},
      {"slln", R"({"model": {"preset": "inward-ou"}, "sim": {"epsilon": 0.02, "seed": 9,
          "observation_times": [2, 3]}, "experiment": {"name": "slln", "paths": 40,
          "observables": ["default", "resolvent:q=3,amp=1,rate=1"]}})"},
      {"outward-moments", R"({"model": {"preset": "outward-ou", "beta": 3}, "sim": {"epsilon": 0.05, "seed": 10,
          "observation_times": [0.5, 1]}, "experiment": {"name": "moments", "paths": 100,
          "observables": ["mass", "phi0"]}})"}};
  std::size_t files = 0;
  std::string bad;
  for (const auto& job : jobs) {
    std::map<std::string, std::string> first;
    for (const auto& [tag, workers] : {std::pair{"a", 1u}, std::pair{"b", 1u}, std::pair{"c", 4u}}) {
      auto cfg = parse_config(job.json);
      cfg.workers = workers;
      cfg.out_dir = (root / job.name / tag).string();
      std::ostringstream log;
      const auto res = run_experiment(cfg, log);
      if (res.exit_code != kExitPass && res.exit_code != kExitAcceptance) {
        bad += " " + job.name + " exit " + std::to_string(res.exit_code);
        continue;
      }
      for (const auto& e : fs::directory_iterator(cfg.out_dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        const auto key = e.path().filename().string();
        if (std::string(tag) == "a") {
          first[key] = os.str();
          ++files;
        } else if (first[key] != os.str()) {
          bad += " " + job.name + "/" + key + " (" + tag + ")";
        }
      }
    }
  }
  fs::remove_all(root);
  return {bad.empty() && files > 0,
          fmt("%zu files x 3 runs (workers 1, 1, 4) compared", files) + (bad.empty() ? "" : "; differ:" + bad)};
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](int id, const char* title, double limit_s, const std::function<Outcome()>& fn) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    const bool in_time = limit_s <= 0.0 || secs < limit_s;
    const bool pass = o.passed && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.1f s%s]\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
                limit_s > 0.0 ? fmt(", limit %.0f s", limit_s).c_str() : "");
    std::fflush(stdout);
  };

  report(1, "oracle identities", 10, criterion1);
  report(2, "moment matching", 300, criterion2);
  report(3, "Laplace functional", 120, criterion3);
  report(4, "martingale suite", 600, criterion4);
  SllnRun slln;
  std::string slln_error;
  const auto t0 = clock::now();
  try {
    slln = slln_run();
  } catch (const std::exception& e) {
    slln_error = e.what();
  }
  const double slln_secs = std::chrono::duration<double>(clock::now() - t0).count();
  std::printf("INFO shared SLLN paths simulated in %.1f s\n", slln_secs);
  auto slln_criterion = [&](Outcome (*fn)(const SllnRun&)) {
    return [&, fn]() -> Outcome {
      if (!slln_error.empty()) return {false, "simulation failed: " + slln_error};
      if (slln_secs >= 900.0) return {false, fmt("shared simulation took %.0f s (limit 900 s)", slln_secs)};
      return fn(slln);
    };
  };
  report(5, "SLLN ball ratio", 0, slln_criterion(criterion5));
  report(6, "SLLN resolvent", 0, slln_criterion(criterion6));
  report(7, "spectral-gap decay", 10, criterion7);
  report(8, "centered-variance growth", 30, criterion8);
  report(9, "Feller check", 30, criterion9);
  report(10, "reproducibility", 0, criterion10);
  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", failures);
  return failures == 0 ? kExitPass : kExitAcceptance;
}
