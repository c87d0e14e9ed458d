// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace superlab {

std::vector<TrajectoryRecord> run_paths(const ModelSpec& spec, const SimConfig& cfg,
                                        const std::vector<TestFunction>& observables,
                                        const SpectralData& sd, std::size_t n_paths,
                                        unsigned workers) {
  cfg.validate();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n_paths, 1)));

  std::vector<std::optional<TrajectoryRecord>> out(n_paths);
  std::vector<std::exception_ptr> errors(n_paths);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{std::numeric_limits<std::size_t>::max()};

  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_paths || i > first_failure.load()) return;
      try {
        out[i] = simulate_path(spec, cfg, observables, sd, i);
      } catch (...) {
        errors[i] = std::current_exception();
        std::size_t cur = first_failure.load();
        while (i < cur && !first_failure.compare_exchange_weak(cur, i)) {
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<TrajectoryRecord> records;
  records.reserve(n_paths);
  for (auto& r : out) records.push_back(std::move(*r));
  return records;
}

double oracle_mean(const ModelSpec& spec, double t, const TestFunction& f, const QuadratureSpec& quad) {
  double s = 0.0;
  for (const auto& atom : spec.initial.atoms) s += atom.mass * mean_semigroup(spec, t, f, atom.position, quad);
  return s;
}

double oracle_variance(const ModelSpec& spec, double t, const TestFunction& f,
                       const QuadratureSpec& quad) {
  double s = 0.0;
  for (const auto& atom : spec.initial.atoms) s += atom.mass * variance_oracle(spec, t, f, atom.position, quad);
  return s;
}

namespace {

std::vector<double> column(const std::vector<TrajectoryRecord>& records, std::size_t row,
                           std::size_t obs) {
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(r.rows.at(row).values.at(obs));
  return v;
}

std::vector<double> observation_times(const std::vector<TrajectoryRecord>& records) {
  std::vector<double> ts;
  if (!records.empty()) {
    for (const auto& row : records.front().rows) ts.push_back(row.t);
  }
  return ts;
}

}  // namespace

MomentTable moment_table(const ModelSpec& spec, const std::vector<TrajectoryRecord>& records,
                         const std::vector<TestFunction>& observables, const QuadratureSpec& quad) {
  MomentTable table;
  table.n_paths = records.size();
  const auto ts = observation_times(records);
  std::size_t ok = 0;
  for (std::size_t j = 0; j < observables.size(); ++j) {
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto s = summarize(column(records, k, j));
      const double m = oracle_mean(spec, ts[k], observables[j], quad);
      const double v = oracle_variance(spec, ts[k], observables[j], quad);
      MomentCell mean{"mean", observables[j].name(), ts[k], s.mean, m, s.se_mean,
                      z_score(s.mean, m, s.se_mean), m != 0.0 ? std::abs(s.mean - m) / std::abs(m) : 0.0};
      MomentCell var{"variance", observables[j].name(), ts[k], s.variance, v, s.se_variance,
                     z_score(s.variance, v, s.se_variance),
                     v != 0.0 ? std::abs(s.variance - v) / v : 0.0};
      for (const auto& c : {mean, var}) {
        if (std::abs(c.z) <= 3.0) ++ok;
        table.cells.push_back(c);
      }
    }
  }
  table.pass_fraction = table.cells.empty() ? 0.0 : static_cast<double>(ok) / table.cells.size();
  table.passed = !table.cells.empty() && table.pass_fraction >= 0.95;
  return table;
}

MomentTable run_moment_validation(const ModelSpec& spec, const SimConfig& cfg,
                                  const std::vector<TestFunction>& observables,
                                  std::size_t n_paths, const QuadratureSpec& quad,
                                  unsigned workers) {
  SpectralData sd;
  try {
    sd = registry_lookup(spec);
  } catch (const NoSpectralDataError&) {
    sd.phi0 = TestFunction::constant(1.0);
    sd.phi0_hat = sd.phi0;
  }
  const auto records = run_paths(spec, cfg, observables, sd, n_paths, workers);
  return moment_table(spec, records, observables, quad);
}

MartingaleReport martingale_report(const ModelSpec& spec, const SpectralData& sd,
                                   const std::vector<TrajectoryRecord>& records,
                                   const QuadratureSpec& quad) {
  MartingaleReport rep;
  const auto ts = observation_times(records);
  double w0 = 0.0;
  double mass = 0.0;
  for (const auto& atom : spec.initial.atoms) {
    w0 += atom.mass * sd.phi0(atom.position);
    mass += atom.mass;
  }
  bool all_ok = true;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::vector<double> w;
    std::vector<double> w2;
    for (const auto& r : records) {
      const auto& row = r.rows.at(k);
      w.push_back(row.w);
      w2.push_back(row.w * row.w);
      if ((row.w == 0.0) != row.extinct) rep.zero_iff_extinct = false;
    }
    MartingaleRow mr;
    mr.t = ts[k];
    mr.w = summarize(w);
    mr.w2 = summarize(w2);
    mr.w_target = w0;
    mr.w2_oracle = std::exp(-2.0 * sd.lambda0 * ts[k]) * oracle_variance(spec, ts[k], sd.phi0, quad) + w0 * w0;
    mr.z_w = z_score(mr.w.mean, w0, mr.w.se_mean);
    mr.z_w2 = z_score(mr.w2.mean, mr.w2_oracle, mr.w2.se_mean);
    all_ok = all_ok && std::abs(mr.z_w) <= 3.0;
    rep.rows.push_back(mr);
  }
  if (!records.empty() && !ts.empty()) {
    std::size_t alive = 0;
    for (const auto& r : records) alive += r.rows.back().extinct ? 0 : 1;
    const double n = static_cast<double>(records.size());
    rep.survival_fraction = static_cast<double>(alive) / n;
    const auto ext = extinction_probability(spec);
    rep.survival_target = 1.0 - std::pow(ext.probability, mass);
    rep.survival_se = std::sqrt(rep.survival_target * (1.0 - rep.survival_target) / n);
    rep.z_survival = z_score(rep.survival_fraction, rep.survival_target, rep.survival_se);
    all_ok = all_ok && std::abs(rep.rows.back().z_w2) <= 3.0 && std::abs(rep.z_survival) <= 3.0;
  } else {
    all_ok = false;
  }
  rep.passed = all_ok && rep.zero_iff_extinct;
  return rep;
}

MartingaleReport run_martingale_test(const ModelSpec& spec, const SimConfig& cfg,
                                     const SpectralData& sd, std::size_t n_paths,
                                     const QuadratureSpec& quad, unsigned workers) {
  const auto records = run_paths(spec, cfg, {}, sd, n_paths, workers);
  return martingale_report(spec, sd, records, quad);
}

SllnReport slln_report(const SpectralData& sd, const std::vector<TrajectoryRecord>& records,
                       const std::vector<SllnObservable>& observables, double burn_in) {
  SllnReport rep;
  rep.n_paths = records.size();
  rep.burn_in = burn_in;
  const auto ts = observation_times(records);
  if (ts.empty()) {
    rep.degenerate = true;
    return rep;
  }
  std::vector<std::size_t> surviving;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].rows.back().extinct) surviving.push_back(i);
  }
  rep.n_surviving = surviving.size();
  rep.survival_fraction = records.empty() ? 0.0 : static_cast<double>(surviving.size()) / records.size();
  rep.degenerate = surviving.empty();
  double w_first = 0.0;
  for (const auto& r : records) w_first += r.rows.front().w;
  rep.w_floor = 1e-6 * std::abs(w_first) / static_cast<double>(records.size());
  std::vector<char> w_positive(records.size(), 0);
  for (std::size_t i : surviving) {
    w_positive[i] = records[i].rows.back().w > rep.w_floor ? 1 : 0;
    if (!w_positive[i]) ++rep.n_locally_extinct;
  }

  std::size_t burn_row = ts.size() - 1;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (ts[k] >= burn_in) {
      burn_row = k;
      break;
    }
  }

  for (std::size_t j = 0; j < observables.size(); ++j) {
    const auto& obs = observables[j];
    std::vector<double> iqr_by_row(ts.size(), 0.0);
    std::vector<double> mad_by_row(ts.size(), 0.0);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      SllnCell cell;
      cell.observable = obs.f.name();
      cell.t = ts[k];
      cell.target = obs.target;
      std::vector<double> scaled;
      std::vector<double> dev;
      std::vector<double> w;
      for (const auto& r : records) {
        const auto& row = r.rows.at(k);
        const double s = std::exp(-sd.lambda0 * row.t) * row.values.at(j);
        scaled.push_back(s);
        dev.push_back(s - obs.target * row.w);
        w.push_back(row.w);
      }
      cell.scaled = summarize(scaled);
      cell.deviation = summarize(dev);
      cell.w_mean = summarize(w).mean;
      std::vector<double> ratio;
      std::vector<double> ratio_wp;
      for (std::size_t i : surviving) {
        const auto& row = records[i].rows.at(k);
        // phi0 can underflow to 0 on a live path whose particles are all far out.
        if (row.phi0 > 0.0) {
          ratio.push_back(row.values.at(j) / row.phi0);
          if (w_positive[i]) ratio_wp.push_back(ratio.back());
        } else {
          ++cell.ratio_undefined;
        }
      }
      if (!ratio_wp.empty()) cell.ratio_w_positive = summarize(ratio_wp);
      if (!ratio.empty()) {
        cell.ratio = summarize(ratio);
        cell.ratio_iqr = interquartile_range(ratio);
        cell.ratio_mad = median_absolute_deviation(ratio, obs.target);
      }
      iqr_by_row[k] = cell.ratio_iqr;
      mad_by_row[k] = cell.ratio_mad;
      rep.cells.push_back(std::move(cell));
    }
    // A ratio that is exactly constant across paths has already converged.
    const bool shrinks = !rep.degenerate && burn_row + 1 < ts.size() &&
                         (iqr_by_row.back() < iqr_by_row[burn_row] ||
                          (iqr_by_row.back() == 0.0 && iqr_by_row[burn_row] == 0.0));
    bool mad_down = !rep.degenerate;
    for (std::size_t k = burn_row + 1; k < ts.size(); ++k) {
      mad_down = mad_down && mad_by_row[k] <= mad_by_row[k - 1];
    }
    rep.iqr_shrinks.emplace_back(obs.f.name(), shrinks);
    rep.mad_decreases.emplace_back(obs.f.name(), mad_down);
  }
  return rep;
}

std::vector<SllnObservable> slln_targets(const ModelSpec& spec, const SpectralData& sd,
                                         const std::vector<TestFunction>& f_list,
                                         const QuadratureSpec& quad,
                                         const std::vector<bool>& resolvent_type) {
  std::vector<SllnObservable> obs;
  for (std::size_t i = 0; i < f_list.size(); ++i) {
    const auto& f = f_list[i];
    const bool resolvent = i < resolvent_type.size() && resolvent_type[i];
    if (!resolvent && !f.domination_constant(sd.phi0)) {
      throw DomainError("SLLN observable " + f.name() + " is not dominated by phi0");
    }
    obs.push_back({f, pairing_with_phi0_hat(spec, sd, f, quad),
                   resolvent ? "quadrature of the tabulated resolvent against phi0_hat"
                             : "quadrature against phi0_hat"});
  }
  return obs;
}

SllnReport run_slln(const ModelSpec& spec, const SimConfig& cfg,
                    const std::vector<TestFunction>& f_list, const SpectralData& sd,
                    std::size_t n_paths, const QuadratureSpec& quad, double burn_in,
                    unsigned workers) {
  const auto obs = slln_targets(spec, sd, f_list, quad);
  const auto records = run_paths(spec, cfg, f_list, sd, n_paths, workers);
  return slln_report(sd, records, obs, burn_in);
}

TabulatedObservable tabulate_resolvent(const ModelSpec& spec, const SpectralData& sd, double q,
                                       const TestFunction& g, const QuadratureSpec& quad,
                                       double tolerance, double half_width) {
  if (spec.spatial.d != 1) {
    throw UnsupportedModelError("resolvent tabulation is implemented for d = 1");
  }
  const double alpha = constant_alpha(spec);
  const auto oracle = [&spec, q, g, quad](double y) {
    const double x[1] = {y};
    return laplace_transform_mean(spec, q, g, x, quad);
  };
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  TabulatedObservable out;
  out.lo = -half_width;
  out.hi = half_width;
  std::shared_ptr<Spline> spline;
  for (std::size_t n = 129;; n = 2 * n - 1) {
    const double h = (out.hi - out.lo) / static_cast<double>(n - 1);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = oracle(out.lo + h * static_cast<double>(i));
    spline = std::make_shared<Spline>(values.begin(), values.end(), out.lo, h);
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double y = out.lo + h * (static_cast<double>(i) + 0.5);
      err = std::max(err, std::abs((*spline)(y) - oracle(y)));
    }
    out.grid_points = n;
    out.max_interp_error = err;
    if (err < tolerance) break;
    if (n > (1u << 15)) {
      throw NumericalError("resolvent tabulation did not reach the interpolation tolerance");
    }
  }

  CustomTraits traits;
  if (auto s = g.sup_bound()) traits.sup_bound = *s / (q - alpha);
  traits.continuous = true;
  traits.vanishes_at_infinity = spec.spatial.kind == MotionKind::OutwardOU && g.is_c0();
  traits.envelope = resolvent_envelope(spec.spatial, g);
  const double lo = out.lo;
  const double hi = out.hi;
  const auto direct = std::function<double(double)>(oracle);
  out.f = TestFunction::custom(
      "U_" + std::to_string(q).substr(0, 4) + "[" + g.name() + "]",
      [spline, direct, lo, hi](std::span<const double> y) {
        return y[0] >= lo && y[0] <= hi ? (*spline)(y[0]) : direct(y[0]);
      },
      traits);
  out.target = pairing_with_phi0_hat(spec, sd, g, quad) / (q - sd.lambda0);
  out.target_quadrature = pairing_with_phi0_hat(spec, sd, out.f, quad);
  return out;
}

SlopeResult gap_decay_slope(const ModelSpec& spec, const SpectralData& sd, const TestFunction& f,
                            std::span<const double> x, std::span<const double> t_grid,
                            const QuadratureSpec& quad, double margin) {
  SlopeResult r;
  const double limit = sd.phi0(x) * pairing_with_phi0_hat(spec, sd, f, quad);
  for (double t : t_grid) {
    const double v = std::exp(-sd.lambda0 * t) * mean_semigroup(spec, t, f, x, quad) - limit;
    r.t.push_back(t);
    r.log_values.push_back(std::log(std::abs(v)));
  }
  r.slope = linear_fit(r.t, r.log_values).slope;
  r.bound = -(sd.gap - margin);
  r.passed = r.slope <= r.bound;
  return r;
}

SlopeResult centered_variance_slope(const ModelSpec& spec, const SpectralData& sd,
                                    const TestFunction& f, std::span<const double> x,
                                    std::span<const double> t_grid, const QuadratureSpec& quad,
                                    double slack) {
  SlopeResult r;
  for (double t : t_grid) {
    r.t.push_back(t);
    r.log_values.push_back(std::log(variance_oracle(spec, t, f, x, quad)));
  }
  r.slope = linear_fit(r.t, r.log_values).slope;
  const double a_tilde = std::min(sd.gap, 0.5 * sd.lambda0) / 2.0;
  r.bound = 2.0 * (sd.lambda0 - a_tilde) + slack;
  r.passed = r.slope <= r.bound;
  return r;
}

}  // namespace superlab
