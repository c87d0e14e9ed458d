// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/particle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace superlab {

const char* to_string(SimScheme s) {
  switch (s) {
    case SimScheme::Auto:
      return "auto";
    case SimScheme::Event:
      return "event";
    case SimScheme::Genealogy:
      return "genealogy";
  }
  return "?";
}

SimScheme parse_scheme(const std::string& s) {
  if (s == "auto") return SimScheme::Auto;
  if (s == "event") return SimScheme::Event;
  if (s == "genealogy") return SimScheme::Genealogy;
  throw ConfigError("unknown simulation scheme '" + s + "' (auto, event, genealogy)");
}

void SimConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (max_particles == 0) throw ConfigError("max_particles must be positive");
  for (std::size_t i = 0; i < observation_times.size(); ++i) {
    if (!(observation_times[i] >= 0.0)) throw ConfigError("observation times must be nonnegative");
    if (i > 0 && !(observation_times[i] > observation_times[i - 1])) {
      throw ConfigError("observation times must be strictly increasing");
    }
  }
}

CapacityError::CapacityError(const std::string& what, double time, std::size_t count)
    : Error(what), time_reached(time), particle_count(count) {}

ChannelRates channel_rates(const ModelSpec& spec, double epsilon) {
  const auto& mech = spec.branching;
  if (!mech.bounds) throw ConfigError("particle scheme needs declared global bounds");
  const auto& bd = *mech.bounds;
  if (bd.weight_sup.size() != mech.atoms.size()) {
    throw ConfigError("declared bounds must list one weight bound per atom");
  }
  ChannelRates r;
  const double bb = bd.beta_sup * bd.b_sup;
  r.binary_bound = 2.0 * bb / epsilon;

  // 1/2 + eps a / (4 b) in [0, 1]  <=>  eps <= 2 b / |a|
  if (bd.a_sup == 0.0 || bd.beta_sup == 0.0) {
    r.max_epsilon = std::numeric_limits<double>::infinity();
  } else if (bd.b_inf && *bd.b_inf > 0.0) {
    r.max_epsilon = 2.0 * *bd.b_inf / bd.a_sup;
  } else {
    r.max_epsilon = 0.0;
  }
  if (epsilon > r.max_epsilon * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "offspring probability 1/2 + eps*a/(4b) leaves [0,1] at eps=" << epsilon;
    if (r.max_epsilon > 0.0) {
      os << "; admissible eps must satisfy eps <= 2*inf(b)/sup|a| = " << r.max_epsilon;
    } else {
      os << "; a != 0 needs a declared positive lower bound on b";
    }
    throw ConfigError(os.str());
  }

  for (std::size_t i = 0; i < mech.atoms.size(); ++i) {
    const double y = mech.atoms[i].jump;
    const auto k = static_cast<long long>(std::llround(y / epsilon));
    if (k < 1 || std::abs(static_cast<double>(k) * epsilon - y) > 0.01 * y) {
      std::ostringstream os;
      os << "jump size " << y << " is not within 1% of a multiple of eps=" << epsilon;
      throw ConfigError(os.str());
    }
    r.spawn_children.push_back(static_cast<std::size_t>(k));
    r.spawn_bound.push_back(epsilon * bd.beta_sup * bd.weight_sup[i]);
    r.death_bound += bd.beta_sup * bd.weight_sup[i] * static_cast<double>(k) * epsilon;
  }
  r.total = r.binary_bound + r.death_bound;
  for (double s : r.spawn_bound) r.total += s;
  return r;
}

bool genealogy_applicable(const ModelSpec& spec) {
  const auto& mech = spec.branching;
  if (!mech.is_homogeneous() || !mech.atoms.empty()) return false;
  return *mech.beta.constant_value() > 0.0 && *mech.b.constant_value() > 0.0;
}

PopulationState init_population(const InitialMeasure& mu, const SimConfig& cfg,
                                std::uint64_t path_id) {
  cfg.validate();
  PopulationState state;
  state.epsilon = cfg.epsilon;
  state.rng = PathRng(cfg.seed, path_id);
  state.dim = mu.atoms.empty() ? 1 : static_cast<int>(mu.atoms.front().position.size());
  std::size_t total = 0;
  std::vector<std::size_t> counts;
  for (const auto& atom : mu.atoms) {
    if (static_cast<int>(atom.position.size()) != state.dim) {
      throw ConfigError("initial atoms have mixed dimensions");
    }
    const double n = std::round(atom.mass / cfg.epsilon);
    if (!(atom.mass > 0.0) || std::abs(n * cfg.epsilon - atom.mass) > 1e-12 * std::max(1.0, atom.mass)) {
      std::ostringstream os;
      os << "initial atom mass " << atom.mass << " is not a positive multiple of eps=" << cfg.epsilon;
      throw ConfigError(os.str());
    }
    counts.push_back(static_cast<std::size_t>(n));
    total += counts.back();
  }
  if (total > cfg.max_particles) {
    std::ostringstream os;
    os << "initial population of " << total << " particles exceeds max_particles=" << cfg.max_particles;
    CapacityError err(os.str(), 0.0, total);
    throw err;
  }
  state.stamps.assign(total, 0.0);
  state.positions.reserve(total * static_cast<std::size_t>(state.dim));
  for (std::size_t a = 0; a < mu.atoms.size(); ++a) {
    for (std::size_t i = 0; i < counts[a]; ++i) {
      state.positions.insert(state.positions.end(), mu.atoms[a].position.begin(),
                             mu.atoms[a].position.end());
    }
  }
  return state;
}

namespace detail {

namespace {

class EventEngine {
 public:
  EventEngine(PopulationState& s, const ModelSpec& spec, const ChannelRates& rates,
              std::size_t cap)
      : s_(s), spec_(spec), rates_(rates), cap_(cap), dim_(static_cast<std::size_t>(s.dim)),
        homogeneous_(spec.branching.is_homogeneous()) {
    const auto& bd = *spec.branching.bounds;
    bb_ = bd.beta_sup * bd.b_sup;
    for (double w : bd.weight_sup) bw_.push_back(bd.beta_sup * w);
  }

  void run(double t_target) {
    const auto& mech = spec_.branching;
    while (s_.size() > 0 && rates_.total > 0.0) {
      const double rate = static_cast<double>(s_.size()) * rates_.total;
      const double dt = s_.rng.exponential() / rate;
      if (s_.time + dt > t_target) break;
      s_.time += dt;
      const auto i = static_cast<std::size_t>(s_.rng.below(s_.size()));
      double u = s_.rng.uniform() * rates_.total;
      ++s_.event_count;

      if (u < rates_.binary_bound) {
        if (!homogeneous_) move(i);
        const auto x = here(i);
        const double beta = mech.beta(x);
        const double b = mech.b(x);
        if (!accept(beta * b / bb_)) continue;
        const double p2 = 0.5 + s_.epsilon * mech.a(x) / (4.0 * b);
        if (p2 < 0.0 || p2 > 1.0) {
          std::ostringstream os;
          os << "offspring probability " << p2 << " outside [0,1]";
          throw ConfigError(os.str());
        }
        if (s_.rng.uniform() < p2) {
          move(i);
          clone(i, 1);
        } else {
          remove(i);
        }
        continue;
      }
      u -= rates_.binary_bound;

      bool handled = false;
      for (std::size_t a = 0; a < mech.atoms.size(); ++a) {
        if (u < rates_.spawn_bound[a]) {
          if (!homogeneous_) move(i);
          const auto x = here(i);
          if (accept(mech.beta(x) * mech.atoms[a].weight(x) / bw_[a])) {
            move(i);
            clone(i, rates_.spawn_children[a]);
          }
          handled = true;
          break;
        }
        u -= rates_.spawn_bound[a];
      }
      if (handled) continue;

      // death clock compensating the spawned mass
      if (!homogeneous_) move(i);
      const auto x = here(i);
      double death = 0.0;
      for (std::size_t a = 0; a < mech.atoms.size(); ++a) {
        death += mech.atoms[a].weight(x) * static_cast<double>(rates_.spawn_children[a]);
      }
      death *= mech.beta(x) * s_.epsilon;
      if (accept(death / rates_.death_bound)) remove(i);
    }
    s_.time = t_target;
    if (s_.track_positions) {
      for (std::size_t i = 0; i < s_.size(); ++i) move(i);
    } else {
      std::fill(s_.stamps.begin(), s_.stamps.end(), t_target);
    }
  }

 private:
  std::span<const double> here(std::size_t i) const {
    if (!s_.track_positions) return {};
    return {s_.positions.data() + i * dim_, dim_};
  }

  bool accept(double ratio) {
    if (ratio >= 1.0) return true;
    return s_.rng.uniform() < ratio;
  }

  void move(std::size_t i) {
    if (!s_.track_positions) return;
    const double dt = s_.time - s_.stamps[i];
    if (dt > 0.0) {
      std::span<double> x(s_.positions.data() + i * dim_, dim_);
      sample_transition(spec_.spatial, x, dt, s_.rng, x);
    }
    s_.stamps[i] = s_.time;
  }

  void clone(std::size_t i, std::size_t copies) {
    if (s_.size() + copies > cap_) {
      std::ostringstream os;
      os << "particle count would exceed max_particles=" << cap_ << " at t=" << s_.time;
      CapacityError err(os.str(), s_.time, s_.size());
      err.partial_state = std::make_shared<const PopulationState>(s_);
      throw err;
    }
    for (std::size_t c = 0; c < copies; ++c) {
      s_.stamps.push_back(s_.stamps[i]);
      if (s_.track_positions) {
        for (std::size_t k = 0; k < dim_; ++k) s_.positions.push_back(s_.positions[i * dim_ + k]);
      }
    }
  }

  void remove(std::size_t i) {
    const std::size_t last = s_.size() - 1;
    if (i != last) {
      s_.stamps[i] = s_.stamps[last];
      if (s_.track_positions) {
        for (std::size_t k = 0; k < dim_; ++k) s_.positions[i * dim_ + k] = s_.positions[last * dim_ + k];
      }
    }
    s_.stamps.pop_back();
    if (s_.track_positions) s_.positions.resize(last * dim_);
  }

  PopulationState& s_;
  const ModelSpec& spec_;
  const ChannelRates& rates_;
  std::size_t cap_;
  std::size_t dim_;
  bool homogeneous_;
  double bb_ = 0.0;
  std::vector<double> bw_;
};

}  // namespace

void step_event(PopulationState& state, double t_target, const ModelSpec& spec,
                const ChannelRates& rates, std::size_t max_particles) {
  EventEngine(state, spec, rates, max_particles).run(t_target);
}

}  // namespace detail

void step_to(PopulationState& state, double t_target, const ModelSpec& spec, const SimConfig& cfg) {
  if (t_target < state.time) throw DomainError("step_to cannot move backwards in time");
  const ChannelRates rates = channel_rates(spec, cfg.epsilon);
  SimScheme scheme = cfg.scheme;
  if (scheme == SimScheme::Auto) {
    scheme = genealogy_applicable(spec) ? SimScheme::Genealogy : SimScheme::Event;
  }
  if (scheme == SimScheme::Genealogy) {
    if (!genealogy_applicable(spec)) {
      throw ConfigError("genealogy scheme needs homogeneous branching without atoms and b, beta > 0");
    }
    detail::step_genealogy(state, t_target, spec, cfg.max_particles);
  } else {
    detail::step_event(state, t_target, spec, rates, cfg.max_particles);
  }
}

double functional(const PopulationState& state, const TestFunction& f) {
  if (auto c = f.constant_value()) return *c * state.total_mass();
  if (!state.track_positions) {
    throw DomainError("functional of " + f.name() + " needs tracked positions");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) s += f(state.position(i));
  return state.epsilon * s;
}

double martingale_value(const PopulationState& state, const SpectralData& sd) {
  if (state.extinct()) return 0.0;
  return std::exp(-sd.lambda0 * state.time) * functional(state, sd.phi0);
}

TrajectoryRecord simulate_path(const ModelSpec& spec, const SimConfig& cfg,
                               const std::vector<TestFunction>& observables,
                               const SpectralData& sd, std::uint64_t path_id) {
  TrajectoryRecord rec;
  rec.path_id = path_id;
  for (const auto& f : observables) rec.observable_names.push_back(f.name());
  PopulationState state = init_population(spec.initial, cfg, path_id);
  state.track_positions =
      !spec.branching.is_homogeneous() || !sd.phi0.constant_value().has_value();
  for (const auto& f : observables) {
    if (!f.constant_value()) state.track_positions = true;
  }
  try {
    for (double t : cfg.observation_times) {
      step_to(state, t, spec, cfg);
      ObservationRow row;
      row.t = t;
      for (const auto& f : observables) row.values.push_back(functional(state, f));
      row.phi0 = state.extinct() ? 0.0 : functional(state, sd.phi0);
      row.w = std::exp(-sd.lambda0 * t) * row.phi0;
      row.count = state.size();
      row.extinct = state.extinct();
      rec.rows.push_back(std::move(row));
    }
  } catch (CapacityError& e) {
    rec.truncated = true;
    rec.events = state.event_count;
    e.partial_record = std::make_shared<const TrajectoryRecord>(rec);
    throw;
  }
  rec.events = state.event_count;
  return rec;
}

}  // namespace superlab
