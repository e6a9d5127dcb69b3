#pragma once

// Sensitivity estimation from trajectory ensembles:
//   delta_phi = sqrt(V(S)) / |d<S>/dphi|,   M = delta_phi * sqrt(N_t)

#include "twi/config.hpp"
#include "twi/ensemble.hpp"
#include "twi/interferometer.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace twi {

struct PhiGrid {
  std::vector<double> values;
  double spacing = 0;

  /// count points from start to stop inclusive.
  static PhiGrid uniform(double start, double stop, std::size_t count);
  /// Three points centred on phi with the given spacing.
  static PhiGrid around(double phi, double spacing);

  void validate() const;
  std::size_t size() const { return values.size(); }
  std::size_t nearest(double phi) const;
};

struct ConfidenceInterval {
  double lo = 0;
  double hi = 0;
  // False when M is undefined (zero derivative) in too many resamples.
  bool defined = false;

  double width() const { return hi - lo; }
};

struct BootstrapOptions {
  std::size_t resamples = 200;
  double level = 0.95;
  std::uint64_t seed = 0;
};

/// Trajectory-level percentile bootstrap of M. `signals` holds S with one row
/// per trajectory and one column per grid phase; whole rows are resampled so
/// V(S) and d<S>/dphi are recomputed jointly.
std::vector<ConfidenceInterval> bootstrap_ci(const Eigen::MatrixXd& signals, const PhiGrid& grid,
                                             double n_total, const BootstrapOptions& options);

struct SensitivityPoint {
  double phi = 0;
  double mean_s_a = 0;
  double var_s_a = 0;
  double mean_s_b = 0;
  double mean_s = 0;
  double var_s = 0;
  double ds_dphi = 0;
  double delta_phi = 0;
  double m = 0;
  ConfidenceInterval ci_m;
};

struct SensitivityCurve {
  std::vector<SensitivityPoint> points;
  std::size_t traj_count = 0;
  double n_total = 0;
  bool correction_on = true;
  CorrectionSign sign = CorrectionSign::plus;

  const SensitivityPoint& at(double phi) const;
  std::size_t argmin_m() const;
};

/// Per-trajectory signal tables over a grid (rows: trajectories).
struct SignalTables {
  Eigen::MatrixXd s_a;
  Eigen::MatrixXd s_b;
  Eigen::MatrixXd s;
};

SignalTables signal_tables(const EnsembleAtT1& ensemble, const PhiGrid& grid, const HomodyneSpec& spec,
                           bool correction_on, unsigned threads = 1);

/// Column means and unbiased variances, then central differences of the mean
/// (one-sided at the ends), delta_phi and M.
std::vector<SensitivityPoint> curve_from_signals(const Eigen::MatrixXd& s, const PhiGrid& grid,
                                                 double n_total);

/// `spec.correction_sign` must already be resolved when `correction_on`.
SensitivityCurve sensitivity_curve(const EnsembleAtT1& ensemble, const PhiGrid& grid,
                                   const HomodyneSpec& spec, double n_total, bool correction_on,
                                   const BootstrapOptions& bootstrap, unsigned threads = 1);

/// Homodyne settings for a config: LO from the gain, correction sign fixed,
/// disabled or calibrated at phi_ref.
HomodyneSpec resolve_homodyne(const EnsembleAtT1& ensemble, const RunConfig& config,
                              double phi_ref = std::numbers::pi / 2);

struct RScanRow {
  double r = 0;
  double m = 0;
  ConfidenceInterval ci_m;
  double m_uncorrected = 0;
  double transferred = 0;
  double var_squeezed = 0;
  double var_antisqueezed = 0;
  double m_plain_analytic = 0;
  double m_recycled_analytic = 0;
  CorrectionSign sign = CorrectionSign::plus;
  ConservationReport conservation;
};

struct OptimumReport {
  double r_star = 0;
  double m_star = 0;
  double atoms_transferred_at_star = 0;
  double equivalent_atom_gain = 0;
  bool at_boundary = false;
  // Where the squeezed quadrature combination is quietest.
  double r_correlation_star = 0;
  double transferred_at_correlation_star = 0;
};

struct RScan {
  std::vector<RScanRow> rows;
  OptimumReport optimum;
};

/// M at phi = pi/2 for every r, using one ensemble per r. In analytic mode
/// the rows come from the closed-form predictions.
RScan optimum_over_r(const std::vector<double>& r_values, const RunConfig& config, unsigned threads = 1);

inline constexpr double kDerivativeSpacing = std::numbers::pi / 100;

}  // namespace twi
