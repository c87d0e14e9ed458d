// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "superlab/particle.hpp"
#include "superlab/quadrature.hpp"
#include "superlab/semigroup.hpp"
#include "superlab/statistics.hpp"

namespace superlab {

/// Runs paths 0..n_paths-1 on a pool of `workers` threads (0 = hardware
/// concurrency). Records come back in path order and do not depend on the
/// pool size. If any path fails, the failure of the lowest path index is
/// rethrown after the pool drains.
std::vector<TrajectoryRecord> run_paths(const ModelSpec& spec, const SimConfig& cfg,
                                        const std::vector<TestFunction>& observables,
                                        const SpectralData& sd, std::size_t n_paths,
                                        unsigned workers = 0);

/// Mean and variance of <f, X_t> from mu, summed over its atoms.
double oracle_mean(const ModelSpec& spec, double t, const TestFunction& f, const QuadratureSpec& quad);
double oracle_variance(const ModelSpec& spec, double t, const TestFunction& f,
                       const QuadratureSpec& quad);

struct MomentCell {
  std::string quantity;  ///< "mean" or "variance"
  std::string observable;
  double t = 0.0;
  double empirical = 0.0;
  double oracle = 0.0;
  double se = 0.0;
  double z = 0.0;
  double rel_error = 0.0;
};

struct MomentTable {
  std::vector<MomentCell> cells;
  std::size_t n_paths = 0;
  double pass_fraction = 0.0;  ///< fraction of cells with |z| <= 3
  bool passed = false;         ///< pass_fraction >= 0.95
};

MomentTable moment_table(const ModelSpec& spec, const std::vector<TrajectoryRecord>& records,
                         const std::vector<TestFunction>& observables, const QuadratureSpec& quad);

MomentTable run_moment_validation(const ModelSpec& spec, const SimConfig& cfg,
                                  const std::vector<TestFunction>& observables,
                                  std::size_t n_paths, const QuadratureSpec& quad,
                                  unsigned workers = 0);

struct MartingaleRow {
  double t = 0.0;
  SampleSummary w;
  SampleSummary w2;
  double w_target = 0.0;   ///< <phi0, mu>
  double w2_oracle = 0.0;  ///< e^{-2 lambda0 t} Var<phi0, X_t> + <phi0, mu>^2
  double z_w = 0.0;
  double z_w2 = 0.0;
};

struct MartingaleReport {
  std::vector<MartingaleRow> rows;
  double survival_fraction = 0.0;
  double survival_se = 0.0;
  double survival_target = 0.0;  ///< 1 - P(extinction)^{||mu||}
  double z_survival = 0.0;
  bool zero_iff_extinct = true;  ///< {W_t = 0} equals {extinct} on every record
  bool passed = false;
};

MartingaleReport martingale_report(const ModelSpec& spec, const SpectralData& sd,
                                   const std::vector<TrajectoryRecord>& records,
                                   const QuadratureSpec& quad);

MartingaleReport run_martingale_test(const ModelSpec& spec, const SimConfig& cfg,
                                     const SpectralData& sd, std::size_t n_paths,
                                     const QuadratureSpec& quad, unsigned workers = 0);

/// Observable with its limit target <f, phi0_hat>_m.
struct SllnObservable {
  TestFunction f;
  double target = 0.0;
  std::string target_source;  ///< how the target was computed
};

struct SllnCell {
  std::string observable;
  double t = 0.0;
  SampleSummary scaled;       ///< e^{-lambda0 t} <f, X_t> over all paths
  SampleSummary deviation;    ///< e^{-lambda0 t} <f, X_t> - target * W_t over all paths
  SampleSummary ratio;        ///< <f, X_t> / <phi0, X_t> over surviving paths
  double ratio_iqr = 0.0;
  double ratio_mad = 0.0;     ///< median absolute deviation from the target
  std::size_t ratio_undefined = 0;  ///< surviving paths with <phi0, X_t> = 0 in floating point
  /// Ratio over surviving paths whose final W is above SllnReport::w_floor.
  SampleSummary ratio_w_positive;
  double target = 0.0;
  double w_mean = 0.0;
};

struct SllnReport {
  std::vector<SllnCell> cells;
  std::size_t n_paths = 0;
  std::size_t n_surviving = 0;  ///< alive at the final observation time
  double survival_fraction = 0.0;
  double burn_in = 2.0;
  bool degenerate = false;      ///< every path extinct
  /// Live paths at the final time with W below w_floor: the population
  /// survives but has left every compact set (local extinction), so the
  /// survival proxy overstates {W_inf > 0}.
  std::size_t n_locally_extinct = 0;
  double w_floor = 0.0;         ///< 1e-6 times the mean W at the first observation time
  /// Per observable: ratio IQR at the final time strictly below the IQR at
  /// burn-in, or zero at both.
  std::vector<std::pair<std::string, bool>> iqr_shrinks;
  /// Per observable: MAD of the ratio non-increasing along times after burn-in.
  std::vector<std::pair<std::string, bool>> mad_decreases;
};

SllnReport slln_report(const SpectralData& sd, const std::vector<TrajectoryRecord>& records,
                       const std::vector<SllnObservable>& observables, double burn_in);

/// Targets <f, phi0_hat>_m by quadrature. Each f must satisfy |f| <= c phi0
/// for a certified c, unless flagged resolvent-type (U_q g). DomainError otherwise.
std::vector<SllnObservable> slln_targets(const ModelSpec& spec, const SpectralData& sd,
                                         const std::vector<TestFunction>& f_list,
                                         const QuadratureSpec& quad,
                                         const std::vector<bool>& resolvent_type = {});

/// Targets by quadrature; records are simulated with the same observables.
SllnReport run_slln(const ModelSpec& spec, const SimConfig& cfg,
                    const std::vector<TestFunction>& f_list, const SpectralData& sd,
                    std::size_t n_paths, const QuadratureSpec& quad, double burn_in = 2.0,
                    unsigned workers = 0);

/// U_q g (or the Laplace transform of the mean when q <= K) tabulated on
/// a uniform 1-D grid and interpolated by cubic B-splines. The grid is
/// refined until the midpoint interpolation error is below `tolerance`.
/// Outside the grid the oracle is evaluated directly.
struct TabulatedObservable {
  TestFunction f;
  double max_interp_error = 0.0;
  std::size_t grid_points = 0;
  double lo = 0.0;
  double hi = 0.0;
  double target = 0.0;          ///< (q - lambda0)^{-1} <g, phi0_hat>_m
  double target_quadrature = 0.0; ///< <U_q g, phi0_hat>_m by quadrature of the tabulated function
};

TabulatedObservable tabulate_resolvent(const ModelSpec& spec, const SpectralData& sd, double q,
                                       const TestFunction& g, const QuadratureSpec& quad,
                                       double tolerance = 1e-6, double half_width = 8.0);

struct SlopeResult {
  std::vector<double> t;
  std::vector<double> log_values;
  double slope = 0.0;
  double bound = 0.0;
  bool passed = false;
};

/// Slope of log|e^{-lambda0 t} T_t f(x) - phi0(x) <f, phi0_hat>_m| along
/// t_grid against the bound -(gap - margin).
SlopeResult gap_decay_slope(const ModelSpec& spec, const SpectralData& sd, const TestFunction& f,
                            std::span<const double> x, std::span<const double> t_grid,
                            const QuadratureSpec& quad, double margin = 0.1);

/// Slope of log Var_{delta_x}<f, X_t> along t_grid against
/// 2(lambda0 - a) + slack with a = min(gap, lambda0/2)/2.
SlopeResult centered_variance_slope(const ModelSpec& spec, const SpectralData& sd,
                                    const TestFunction& f, std::span<const double> x,
                                    std::span<const double> t_grid, const QuadratureSpec& quad,
                                    double slack = 0.05);

}  // namespace superlab
