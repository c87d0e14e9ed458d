// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Interval sampler for the homogeneous binary particle system. Each
// particle alive at the start of an interval of length D founds an
// independent linear birth-death tree (birth rate l, death rate m). Given
// the tree survives, its tip count is geometric with mean W(D), and the
// tips form a coalescent point process whose node depths are i.i.d. with
// P(H > h) = 1/W(h). Tip positions follow the OU motion along the tree:
// each new tip branches off the previous tip's lineage, which is resolved
// at the branch time by an OU bridge between known points on that lineage.
#include <cmath>
#include <sstream>

#include "superlab/particle.hpp"

namespace superlab::detail {

namespace {

struct BirthDeath {
  double birth = 0.0;
  double death = 0.0;
  double r = 0.0;

  // W(h) = (birth e^{r h} - death) / r
  double w(double h) const {
    if (r == 0.0) return 1.0 + birth * h;
    return (birth * std::exp(r * h) - death) / r;
  }

  // Solves W(h) = target for h.
  double inverse_w(double target) const {
    if (r == 0.0) return (target - 1.0) / birth;
    return std::log((r * target + death) / birth) / r;
  }
};

struct Knot {
  double time;
  std::size_t offset;  // into the knot position buffer
};

}  // namespace

void step_genealogy(PopulationState& state, double t_target, const ModelSpec& spec,
                    std::size_t max_particles) {
  const double span = t_target - state.time;
  if (span <= 0.0) {
    state.time = t_target;
    return;
  }
  const auto& mech = spec.branching;
  const double a = *mech.a.constant_value();
  const double b = *mech.b.constant_value();
  const double beta = *mech.beta.constant_value();
  const double eps = state.epsilon;

  BirthDeath bd;
  bd.birth = beta * b / eps + 0.5 * beta * a;
  bd.death = beta * b / eps - 0.5 * beta * a;
  bd.r = beta * a;

  const double w_span = bd.w(span);
  const double survive = std::exp(bd.r * span) / w_span;
  const double tail = 1.0 - 1.0 / w_span;  // P(N > n | N >= n) given survival
  const double log_tail = std::log(tail);
  auto& rng = state.rng;
  const auto dim = static_cast<std::size_t>(state.dim);
  const auto& motion = spec.spatial;

  std::vector<double> next_positions;
  std::size_t next_count = 0;
  std::vector<Knot> stack;
  std::vector<double> knot_pos;
  std::vector<double> scratch(dim);

  const auto capacity_fail = [&](std::size_t count) {
    std::ostringstream os;
    os << "particle count would exceed max_particles=" << max_particles << " by t=" << t_target;
    CapacityError err(os.str(), state.time, count);
    err.partial_state = std::make_shared<const PopulationState>(state);
    throw err;
  };

  for (std::size_t p = 0; p < state.size(); ++p) {
    const double u = rng.uniform();
    if (u >= survive) continue;
    std::size_t n = 1;
    if (tail > 0.0) {
      const double extra = std::floor(std::log(u / survive) / log_tail);
      if (extra >= static_cast<double>(max_particles)) capacity_fail(next_count + max_particles);
      n += static_cast<std::size_t>(extra);
    }
    if (next_count + n > max_particles) capacity_fail(next_count + n);
    next_count += n;
    state.event_count += n;
    if (!state.track_positions) continue;

    // First tip: the founder's own lineage over the whole interval.
    stack.clear();
    knot_pos.clear();
    const auto root = state.position(p);
    knot_pos.insert(knot_pos.end(), root.begin(), root.end());
    stack.push_back({0.0, 0});
    sample_transition(motion, root, span, rng, scratch);
    stack.push_back({span, knot_pos.size()});
    knot_pos.insert(knot_pos.end(), scratch.begin(), scratch.end());
    next_positions.insert(next_positions.end(), scratch.begin(), scratch.end());

    for (std::size_t j = 1; j < n; ++j) {
      // Node depth H conditioned on H <= span.
      const double v = rng.uniform();
      const double target = 1.0 / (1.0 - v * (1.0 - 1.0 / w_span));
      const double depth = std::min(std::max(bd.inverse_w(target), 0.0), span);
      const double tau = span - depth;

      std::size_t hi = stack.size() - 1;
      while (hi > 0 && stack[hi - 1].time > tau) --hi;
      const Knot left = stack[hi - 1];
      const Knot right = stack[hi];

      // OU bridge between (left.time, xs) and (right.time, xu) at tau.
      const double fa = motion.mean_factor(tau - left.time);
      const double fb = motion.mean_factor(right.time - tau);
      const double v1 = motion.variance(tau - left.time);
      const double v2 = motion.variance(right.time - tau);
      const double denom = fb * fb * v1 + v2;
      const double gain = denom > 0.0 ? v1 * fb / denom : 0.0;
      const double sd = denom > 0.0 ? std::sqrt(v1 * v2 / denom) : 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double xs = knot_pos[left.offset + k];
        const double xu = knot_pos[right.offset + k];
        const double prior = fa * xs;
        scratch[k] = prior + gain * (xu - fb * prior) + sd * rng.normal();
      }

      stack.resize(hi);
      knot_pos.resize(right.offset);
      stack.push_back({tau, knot_pos.size()});
      knot_pos.insert(knot_pos.end(), scratch.begin(), scratch.end());
      const std::size_t branch = stack.back().offset;
      if (span - tau > 0.0) {
        sample_transition(motion, std::span<const double>(knot_pos.data() + branch, dim),
                          span - tau, rng, scratch);
      }
      stack.push_back({span, knot_pos.size()});
      knot_pos.insert(knot_pos.end(), scratch.begin(), scratch.end());
      next_positions.insert(next_positions.end(), scratch.begin(), scratch.end());
    }
  }

  state.positions = std::move(next_positions);
  state.stamps.assign(next_count, t_target);
  state.time = t_target;
}

}  // namespace superlab::detail
