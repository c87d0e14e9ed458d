// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/runner.hpp"

#include <cmath>
#include <filesystem>
#include <memory>
#include <ostream>
#include <sstream>

#include "superlab/experiment.hpp"
#include "superlab/rng.hpp"
#include "superlab/semigroup.hpp"

namespace superlab {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) { return format_number(v); }

std::string point_text(const Point& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + fmt(x[i]);
  return s;
}

Point axis_point(int d, double first) {
  Point p(static_cast<std::size_t>(d), 0.0);
  p[0] = first;
  return p;
}

std::optional<SpectralData> try_registry(const ModelSpec& spec) {
  try {
    return registry_lookup(spec);
  } catch (const NoSpectralDataError&) {
    return std::nullopt;
  }
}

/// Eigendata placeholder for models without a registry entry: W then
/// reduces to the total mass and is not reported as a martingale.
SpectralData unit_spectral_data() {
  SpectralData sd;
  sd.phi0 = TestFunction::constant(1.0);
  sd.phi0_hat = sd.phi0;
  sd.entry = "none";
  return sd;
}

bool within(double estimate, double target, double se, double abs_slack) {
  return std::abs(estimate - target) <= 3.0 * se + abs_slack;
}

std::string z_detail(double est, double target, double se) {
  std::ostringstream os;
  os << "estimate " << fmt(est) << " target " << fmt(target) << " se " << fmt(se) << " z "
     << fmt(z_score(est, target, se));
  return os.str();
}

class Run {
 public:
  Run(const ExperimentConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {}

  RunResult execute();

 private:
  fs::path file(const std::string& name) const { return fs::path(cfg_.out_dir) / name; }
  void note(const std::string& path) { result_.files.push_back(path); }
  void require_valid_model();
  const SpectralData& require_sd();
  std::vector<TrajectoryRecord> simulate(const std::vector<TestFunction>& fns, const SpectralData& sd);

  void validate();
  void moments();
  void martingale();
  void slln();
  void registry_dump();
  void oracle_export();

  const ExperimentConfig& cfg_;
  std::ostream& log_;
  ModelSpec spec_;
  std::optional<SpectralData> sd_;
  Metadata meta_;
  RunResult result_;
};

void Run::require_valid_model() {
  const auto report = validate_model(spec_);
  if (report.passed()) return;
  std::string msg = "model fails validation:";
  for (const auto& e : report.entries) {
    if (e.status == CheckStatus::Fail) msg += " " + e.name + " (" + e.detail + ");";
  }
  throw ConfigError(msg);
}

const SpectralData& Run::require_sd() {
  if (!sd_) throw NoSpectralDataError("no spectral data registered for " + spec_.describe());
  return *sd_;
}

std::vector<TrajectoryRecord> Run::simulate(const std::vector<TestFunction>& fns,
                                            const SpectralData& sd) {
  log_ << "simulating " << cfg_.n_paths << " paths (epsilon " << fmt(cfg_.sim.epsilon) << ")\n";
  auto records = run_paths(spec_, cfg_.sim, fns, sd, cfg_.n_paths, cfg_.workers);
  write_trajectories(file("trajectories.csv"), meta_, records);
  note(file("trajectories.csv").string());
  return records;
}

void Run::validate() {
  auto& checks = result_.checks;
  const auto report = validate_model(spec_);
  CsvWriter csv(file("validation.csv"), meta_, {"check", "status", "value", "detail"});
  for (const auto& e : report.entries) {
    checks.entries.push_back(e);
    csv.row({e.name, to_string(e.status), fmt(e.value), e.detail});
  }
  const auto rates = channel_rates(spec_, cfg_.sim.epsilon);
  checks.add("sim:epsilon-admissible", true,
             "epsilon " + fmt(cfg_.sim.epsilon) + " <= " + fmt(rates.max_epsilon), rates.max_epsilon);
  csv.row({"sim:epsilon-admissible", "pass", fmt(rates.max_epsilon), "largest admissible epsilon"});
  const auto pop = [&] {
    try {
      return init_population(spec_.initial, cfg_.sim);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + "; offspring-probability bound admits epsilon <= " +
                        fmt(rates.max_epsilon));
    }
  }();
  checks.add("sim:initial-population", true, std::to_string(pop.size()) + " particles");
  csv.row({"sim:initial-population", "pass", std::to_string(pop.size()), "initial particle count"});
  csv.row({"sim:scheme", "pass", "0", genealogy_applicable(spec_) ? "genealogy applicable" : "event"});
  note(file("validation.csv").string());
}

void Run::moments() {
  require_valid_model();
  const SpectralData sd = sd_ ? *sd_ : unit_spectral_data();
  const auto obs = build_observables(cfg_, spec_, sd_ ? &*sd_ : nullptr);
  const auto records = simulate(obs.functions, sd);
  const auto table = moment_table(spec_, records, obs.functions, cfg_.quad);
  CsvWriter csv(file("moments.csv"), meta_,
                {"quantity", "observable", "t", "empirical", "oracle", "se", "z", "rel_error"});
  std::size_t ok = 0;
  for (const auto& c : table.cells) {
    csv.row({c.quantity, c.observable, fmt(c.t), fmt(c.empirical), fmt(c.oracle), fmt(c.se), fmt(c.z),
             fmt(c.rel_error)});
    if (std::abs(c.z) <= 3.0) ++ok;
  }
  note(file("moments.csv").string());
  result_.checks.add("moments:cells-within-3se", table.passed,
                     std::to_string(ok) + "/" + std::to_string(table.cells.size()) +
                         " cells with |z| <= 3 (need 95%)",
                     table.pass_fraction);
}

void Run::martingale() {
  require_valid_model();
  const auto& sd = require_sd();
  const auto obs = build_observables(cfg_, spec_, &sd);
  const auto records = simulate(obs.functions, sd);
  const auto rep = martingale_report(spec_, sd, records, cfg_.quad);
  CsvWriter csv(file("martingale.csv"), meta_, {"t", "quantity", "empirical", "target", "se", "z"});
  auto& checks = result_.checks;
  for (const auto& r : rep.rows) {
    csv.row({fmt(r.t), "W", fmt(r.w.mean), fmt(r.w_target), fmt(r.w.se_mean), fmt(r.z_w)});
    csv.row({fmt(r.t), "W^2", fmt(r.w2.mean), fmt(r.w2_oracle), fmt(r.w2.se_mean), fmt(r.z_w2)});
    checks.add("martingale:mean-W t=" + fmt(r.t), std::abs(r.z_w) <= 3.0,
               z_detail(r.w.mean, r.w_target, r.w.se_mean));
  }
  if (!rep.rows.empty()) {
    const auto& last = rep.rows.back();
    checks.add("martingale:second-moment t=" + fmt(last.t), std::abs(last.z_w2) <= 3.0,
               z_detail(last.w2.mean, last.w2_oracle, last.w2.se_mean));
    csv.row({fmt(last.t), "survival", fmt(rep.survival_fraction), fmt(rep.survival_target),
             fmt(rep.survival_se), fmt(rep.z_survival)});
    checks.add("martingale:survival t=" + fmt(last.t), std::abs(rep.z_survival) <= 3.0,
               z_detail(rep.survival_fraction, rep.survival_target, rep.survival_se));
  }
  checks.add("martingale:W-zero-iff-extinct", rep.zero_iff_extinct);
  note(file("martingale.csv").string());
}

void Run::slln() {
  require_valid_model();
  const auto& sd = require_sd();
  const auto obs = build_observables(cfg_, spec_, &sd);
  const auto targets = slln_targets(spec_, sd, obs.functions, cfg_.quad, obs.resolvent_type);
  const auto records = simulate(obs.functions, sd);
  const auto rep = slln_report(sd, records, targets, cfg_.burn_in);

  CsvWriter csv(file("slln.csv"), meta_,
                {"observable", "t", "scaled_mean", "scaled_se", "deviation_mean", "deviation_se",
                 "ratio_mean", "ratio_se", "ratio_iqr", "ratio_mad", "target", "w_mean", "n_ratio",
                 "ratio_undefined"});
  for (const auto& c : rep.cells) {
    csv.row({c.observable, fmt(c.t), fmt(c.scaled.mean), fmt(c.scaled.se_mean), fmt(c.deviation.mean),
             fmt(c.deviation.se_mean), fmt(c.ratio.mean), fmt(c.ratio.se_mean), fmt(c.ratio_iqr),
             fmt(c.ratio_mad), fmt(c.target), fmt(c.w_mean), std::to_string(c.ratio.n),
             std::to_string(c.ratio_undefined)});
  }
  note(file("slln.csv").string());

  auto& checks = result_.checks;
  checks.add("slln:survivors", !rep.degenerate,
             std::to_string(rep.n_surviving) + "/" + std::to_string(rep.n_paths) + " paths alive at the final time",
             rep.survival_fraction);
  const std::size_t n_times = cfg_.sim.observation_times.size();
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto& last = rep.cells.at(j * n_times + n_times - 1);
    const std::string tag = "[" + last.observable + "] t=" + fmt(last.t);
    const double slack = 1e-9 * std::max(1.0, std::abs(last.target));
    if (!rep.degenerate) {
      std::string detail = z_detail(last.ratio.mean, last.target, last.ratio.se_mean);
      if (last.ratio_undefined > 0) {
        detail += " (" + std::to_string(last.ratio_undefined) + " live paths with <phi0,X_t> = 0 excluded)";
      }
      checks.add("slln:ratio" + tag, within(last.ratio.mean, last.target, last.ratio.se_mean, slack), detail);
    }
    checks.add("slln:scaled-vs-target-W" + tag, within(last.deviation.mean, 0.0, last.deviation.se_mean, slack),
               "mean of e^{-lambda0 t}<f,X_t> - target W_t: " +
                   z_detail(last.deviation.mean, 0.0, last.deviation.se_mean));
    checks.add("slln:iqr-shrinks[" + last.observable + "]", rep.iqr_shrinks.at(j).second,
               "ratio IQR at the final time below the IQR at burn-in t=" + fmt(rep.burn_in));
    if (rep.n_locally_extinct > 0 && !rep.degenerate) {
      checks.skip("slln:ratio-given-W-positive" + tag,
                  std::to_string(rep.n_locally_extinct) + " live paths have W below " + fmt(rep.w_floor) +
                      " (local extinction); over the rest " +
                      z_detail(last.ratio_w_positive.mean, last.target, last.ratio_w_positive.se_mean));
    }
    // Reported, not gated: the MAD sequence is noisy on short grids.
    checks.skip("slln:mad-trend[" + last.observable + "]",
                rep.mad_decreases.at(j).second ? "non-increasing after burn-in" : "not monotone after burn-in");
  }

  if (cfg_.svg) {
    const auto& ts = cfg_.sim.observation_times;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      std::vector<SvgSeries> scaled;
      for (std::size_t i = 0; i < std::min<std::size_t>(records.size(), 25); ++i) {
        SvgSeries s{"path " + std::to_string(i), {}, {}, false};
        for (const auto& row : records[i].rows) {
          s.x.push_back(row.t);
          s.y.push_back(std::exp(-sd.lambda0 * row.t) * row.values[j]);
        }
        scaled.push_back(std::move(s));
      }
      const auto name = "slln_" + std::to_string(j);
      write_svg(file(name + "_scaled.svg"), meta_, targets[j].f.name() + ": e^{-lambda0 t}<f,X_t>", "t",
                "scaled functional", scaled);
      std::vector<SvgSeries> ratio{{"q25", {}, {}, false}, {"median", {}, {}, true}, {"q75", {}, {}, false},
                                   {"target", {}, {}, false}};
      for (std::size_t k = 0; k < ts.size(); ++k) {
        std::vector<double> v;
        for (const auto& r : records) {
          if (!r.rows.back().extinct) v.push_back(r.rows[k].values[j] / r.rows[k].phi0);
        }
        if (v.empty()) continue;
        const double qs[3] = {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
        for (int q = 0; q < 3; ++q) {
          ratio[q].x.push_back(ts[k]);
          ratio[q].y.push_back(qs[q]);
        }
        ratio[3].x.push_back(ts[k]);
        ratio[3].y.push_back(targets[j].target);
      }
      write_svg(file(name + "_ratio.svg"), meta_, targets[j].f.name() + ": ratio on surviving paths", "t",
                "<f,X_t>/<phi0,X_t>", ratio);
      note(file(name + "_scaled.svg").string());
      note(file(name + "_ratio.svg").string());
    }
  }
}

void Run::registry_dump() {
  CsvWriter csv(file("registry.csv"), meta_,
                {"entry", "parameters", "lambda0_rule", "lambda0", "gap", "phi0", "lambda0_provenance",
                 "gap_provenance"});
  for (const auto& r : registry_table()) {
    csv.row({r.entry, r.parameters, r.lambda0_rule, fmt(r.lambda0), fmt(r.gap), r.phi0, r.provenance,
             r.gap_provenance});
  }
  note(file("registry.csv").string());
  if (sd_) {
    result_.checks.add("registry:model-entry", true, sd_->entry + " lambda0 " + fmt(sd_->lambda0), sd_->lambda0);
  } else {
    result_.checks.skip("registry:model-entry", "no entry for the configured model");
  }
}

void Run::oracle_export() {
  const auto obs = build_observables(cfg_, spec_, sd_ ? &*sd_ : nullptr);
  CsvWriter csv(file("oracle.csv"), meta_, {"model", "f", "t", "x", "quantity", "value"});
  for (const auto& f : obs.functions) {
    for (double t : cfg_.sim.observation_times) {
      for (const auto& x : cfg_.oracle_points) {
        const auto row = [&](const char* q, double v) {
          csv.row({spec_.name, f.name(), fmt(t), point_text(x), q, fmt(v)});
        };
        row("mean", mean_semigroup(spec_, t, f, x, cfg_.quad));
        row("variance", variance_oracle(spec_, t, f, x, cfg_.quad));
        if (sd_) row("h_semigroup", h_semigroup(spec_, t, f, x, cfg_.quad));
        if (spec_.htransform) row("original_mean", original_mean_semigroup(spec_, t, f, x, cfg_.quad));
      }
    }
  }
  note(file("oracle.csv").string());
  result_.checks.add("oracle:rows", true, std::to_string(obs.functions.size()) + " observables");
}

RunResult Run::execute() {
  try {
    spec_ = build_model(cfg_);
    sd_ = try_registry(spec_);
    meta_ = run_metadata(cfg_, spec_);
    result_.checks.subject = "superlab " + cfg_.experiment + " (" + spec_.describe() + ")";
    log_ << cfg_.experiment << ": " << spec_.describe() << '\n';
    if (cfg_.experiment == "validate") validate();
    else if (cfg_.experiment == "moments") moments();
    else if (cfg_.experiment == "martingale") martingale();
    else if (cfg_.experiment == "slln") slln();
    else if (cfg_.experiment == "registry-dump") registry_dump();
    else if (cfg_.experiment == "oracle-export") oracle_export();
    else throw ConfigError("unknown experiment '" + cfg_.experiment + "'");
  } catch (const CapacityError& e) {
    result_.exit_code = kExitCapacity;
    result_.message = e.what();
    if (e.partial_record) {
      write_trajectories(file("partial_trajectory.csv"), meta_, {*e.partial_record});
      note(file("partial_trajectory.csv").string());
    }
    return result_;
  } catch (const ConfigError& e) {
    result_.exit_code = kExitConfig;
    result_.message = e.what();
    return result_;
  } catch (const DomainError& e) {
    result_.exit_code = kExitConfig;
    result_.message = e.what();
    return result_;
  } catch (const NoSpectralDataError& e) {
    result_.exit_code = kExitConfig;
    result_.message = e.what();
    return result_;
  } catch (const UnsupportedModelError& e) {
    result_.exit_code = kExitConfig;
    result_.message = e.what();
    return result_;
  }
  write_summary(file("summary.txt"), meta_, result_.checks);
  note(file("summary.txt").string());
  result_.exit_code = result_.checks.passed() ? kExitPass : kExitAcceptance;
  return result_;
}

}  // namespace

BuiltObservables build_observables(const ExperimentConfig& cfg, const ModelSpec& spec,
                                   const SpectralData* sd) {
  BuiltObservables out;
  const int d = spec.spatial.d;
  const auto tokens = parse_observables(cfg.observables, d);
  for (const auto& t : tokens) {
    TestFunction f;
    bool resolvent = false;
    if (t.kind == "mass") {
      f = TestFunction::constant(1.0).with_name("mass");
    } else if (t.kind == "phi0") {
      if (sd == nullptr) throw NoSpectralDataError("observable phi0 needs registered spectral data");
      f = sd->phi0.with_name("phi0");
    } else if (t.kind == "coordinate") {
      f = TestFunction::coordinate(t.axis).with_name("x" + std::to_string(t.axis + 1));
    } else if (t.kind == "ball") {
      f = TestFunction::ball_indicator(axis_point(d, t.center), t.radius)
              .with_name("ball(r=" + fmt(t.radius) + ",x=" + fmt(t.center) + ")");
    } else if (t.kind == "gaussian") {
      f = TestFunction::gaussian(t.amp, t.rate, axis_point(d, t.center))
              .with_name("gaussian(amp=" + fmt(t.amp) + ",rate=" + fmt(t.rate) + ",x=" + fmt(t.center) + ")");
    } else if (t.kind == "resolvent") {
      if (sd == nullptr) throw NoSpectralDataError("resolvent observables need registered spectral data");
      const auto g = TestFunction::gaussian(t.amp, t.rate, axis_point(d, t.center));
      const auto tab = tabulate_resolvent(spec, *sd, t.q, g, cfg.quad);
      f = tab.f.with_name("U_q[gaussian](q=" + fmt(t.q) + ",amp=" + fmt(t.amp) + ",rate=" + fmt(t.rate) +
                          ",x=" + fmt(t.center) + ")");
      resolvent = true;
    } else {
      throw ConfigError("unknown observable kind '" + t.kind + "'");
    }
    out.functions.push_back(std::move(f));
    out.resolvent_type.push_back(resolvent);
  }
  return out;
}

Metadata run_metadata(const ExperimentConfig& cfg, const ModelSpec& spec) {
  const bool genealogy = cfg.sim.scheme == SimScheme::Genealogy ||
                         (cfg.sim.scheme == SimScheme::Auto && genealogy_applicable(spec));
  return {
      {"superlab_version", SUPERLAB_VERSION},
      {"experiment", cfg.experiment},
      {"config_hash", config_hash(cfg)},
      {"config", canonical_config(cfg)},
      {"model_hash", model_hash(spec)},
      {"model", spec.describe()},
      {"seed", std::to_string(cfg.sim.seed)},
      {"paths", std::to_string(cfg.n_paths)},
      {"epsilon", fmt(cfg.sim.epsilon)},
      {"max_particles", std::to_string(cfg.sim.max_particles)},
      {"scheme", genealogy ? "genealogy" : "event"},
      {"rng", PathRng::kIdentifier},
  };
}

RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  return Run(cfg, log).execute();
}

}  // namespace superlab
