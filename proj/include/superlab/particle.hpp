// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "superlab/errors.hpp"
#include "superlab/model.hpp"
#include "superlab/rng.hpp"
#include "superlab/spectral.hpp"
#include "superlab/test_function.hpp"

namespace superlab {

/// Event: thinned exponential clocks over the whole population, valid for
/// every model. Genealogy: exact per-interval sampling of the same particle
/// system through birth-death counts, coalescent node depths and OU bridges;
/// needs spatially homogeneous branching without atoms. Auto picks
/// Genealogy whenever it applies.
enum class SimScheme { Auto, Event, Genealogy };

const char* to_string(SimScheme s);
SimScheme parse_scheme(const std::string& s);

struct SimConfig {
  double epsilon = 0.01;
  std::size_t max_particles = 20'000'000;
  std::uint64_t seed = 42;
  std::vector<double> observation_times;
  SimScheme scheme = SimScheme::Auto;

  /// ConfigError unless epsilon > 0, max_particles > 0 and the observation
  /// times are nonnegative and strictly increasing.
  void validate() const;
};

/// Particle system at one time. Positions are stored row-major
/// (size() * dim). In the event scheme a particle's position is current at
/// its stamp; after init_population and step_to every stamp equals time.
struct PopulationState {
  double time = 0.0;
  int dim = 1;
  double epsilon = 0.0;
  std::vector<double> positions;
  std::vector<double> stamps;
  std::uint64_t event_count = 0;
  PathRng rng{0, 0};
  /// When false, positions are not evolved; only constant functionals are available.
  bool track_positions = true;

  std::size_t size() const { return stamps.size(); }
  bool extinct() const { return stamps.empty(); }
  std::span<const double> position(std::size_t i) const {
    return {positions.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  double total_mass() const { return epsilon * static_cast<double>(size()); }
};

struct ObservationRow {
  double t = 0.0;
  std::vector<double> values;  ///< <f_j, X_t> per observable
  double phi0 = 0.0;           ///< <phi0, X_t>
  double w = 0.0;              ///< e^{-lambda0 t} <phi0, X_t>
  std::size_t count = 0;
  bool extinct = false;
};

struct TrajectoryRecord {
  std::uint64_t path_id = 0;
  std::vector<std::string> observable_names;
  std::vector<ObservationRow> rows;
  std::uint64_t events = 0;
  bool truncated = false;  ///< capacity exceeded before the last observation
};

/// Particle cap exceeded. Carries the population and record at the point of failure.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, double time_reached, std::size_t count);

  double time_reached = 0.0;
  std::size_t particle_count = 0;
  std::shared_ptr<const PopulationState> partial_state;
  std::shared_ptr<const TrajectoryRecord> partial_record;
};

/// Rates of the event scheme derived from a model and epsilon.
struct ChannelRates {
  double binary_bound = 0.0;                ///< 2 ||beta b|| / eps per particle
  std::vector<double> spawn_bound;          ///< eps ||beta w_i|| per particle
  std::vector<std::size_t> spawn_children;  ///< round(y_i / eps)
  double death_bound = 0.0;                 ///< ||beta sum_i w_i k_i eps|| per particle
  double total = 0.0;
  double max_epsilon = 0.0;                 ///< largest eps with offspring probability in [0, 1]
};

/// ConfigError when eps leaves the offspring probability outside [0, 1],
/// when a jump size is not within 1% of a multiple of eps, or when the
/// model has no declared bounds.
ChannelRates channel_rates(const ModelSpec& spec, double epsilon);

/// Whether the genealogy scheme can simulate this model.
bool genealogy_applicable(const ModelSpec& spec);

/// Each atom (x, m) becomes m/eps particles at x.
PopulationState init_population(const InitialMeasure& mu, const SimConfig& cfg,
                                std::uint64_t path_id = 0);

/// Evolve to t_target with the configured scheme.
void step_to(PopulationState& state, double t_target, const ModelSpec& spec, const SimConfig& cfg);

/// eps * sum_i f(x_i).
double functional(const PopulationState& state, const TestFunction& f);

/// e^{-lambda0 t} <phi0, X_t>.
double martingale_value(const PopulationState& state, const SpectralData& sd);

/// Runs through cfg.observation_times recording every observable, W and
/// the particle count. Deterministic in (cfg.seed, path_id). Capacity
/// errors propagate with the partial record attached.
TrajectoryRecord simulate_path(const ModelSpec& spec, const SimConfig& cfg,
                               const std::vector<TestFunction>& observables,
                               const SpectralData& sd, std::uint64_t path_id);

namespace detail {
void step_event(PopulationState& state, double t_target, const ModelSpec& spec,
                const ChannelRates& rates, std::size_t max_particles);
void step_genealogy(PopulationState& state, double t_target, const ModelSpec& spec,
                    std::size_t max_particles);
}  // namespace detail

}  // namespace superlab
