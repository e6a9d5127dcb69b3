#include "twi/estimator.hpp"

#include "twi/analytics.hpp"
#include "twi/parallel.hpp"
#include "twi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twi {

PhiGrid PhiGrid::uniform(double start, double stop, std::size_t count) {
  if (count < 2 || !(stop > start)) throw std::invalid_argument("PhiGrid: degenerate grid");
  PhiGrid g;
  g.spacing = (stop - start) / static_cast<double>(count - 1);
  g.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) g.values[i] = start + g.spacing * static_cast<double>(i);
  g.values.back() = stop;
  return g;
}

PhiGrid PhiGrid::around(double phi, double spacing) {
  if (!(spacing > 0)) throw std::invalid_argument("PhiGrid: spacing must be > 0");
  PhiGrid g;
  g.spacing = spacing;
  g.values = {phi - spacing, phi, phi + spacing};
  return g;
}

void PhiGrid::validate() const {
  if (values.size() < 2 || !(spacing > 0)) throw std::invalid_argument("PhiGrid: degenerate grid");
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double step = values[i] - values[i - 1];
    if (!(step > 0)) throw std::invalid_argument("PhiGrid: values must be strictly increasing");
    if (std::abs(step - spacing) > 1e-12 * std::max(1.0, std::abs(values[i]))) {
      throw std::invalid_argument("PhiGrid: spacing is not uniform");
    }
  }
}

std::size_t PhiGrid::nearest(double phi) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (std::abs(values[i] - phi) < std::abs(values[best] - phi)) best = i;
  }
  return best;
}

const SensitivityPoint& SensitivityCurve::at(double phi) const {
  if (points.empty()) throw std::out_of_range("SensitivityCurve is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (std::abs(points[i].phi - phi) < std::abs(points[best].phi - phi)) best = i;
  }
  return points[best];
}

std::size_t SensitivityCurve::argmin_m() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].m < points[best].m) best = i;
  }
  return best;
}

namespace {

double central_difference(std::span<const double> means, std::size_t j, double h) {
  const std::size_t n = means.size();
  if (j == 0) return (means[1] - means[0]) / h;
  if (j + 1 == n) return (means[n - 1] - means[n - 2]) / h;
  return (means[j + 1] - means[j - 1]) / (2 * h);
}

double figure_of_merit(double var, double slope, double n_total) {
  return std::sqrt(var) / std::abs(slope) * std::sqrt(n_total);
}

double percentile(std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<SensitivityPoint> curve_from_signals(const Eigen::MatrixXd& s, const PhiGrid& grid,
                                                 double n_total) {
  grid.validate();
  if (static_cast<std::size_t>(s.cols()) != grid.size()) {
    throw std::invalid_argument("curve_from_signals: column count does not match grid");
  }
  if (s.rows() < 2) throw std::invalid_argument("curve_from_signals: need at least two trajectories");
  const std::size_t m = grid.size();
  std::vector<double> means(m);
  std::vector<SensitivityPoint> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto col = s.col(static_cast<Eigen::Index>(j));
    const std::span<const double> xs(col.data(), static_cast<std::size_t>(col.size()));
    out[j].phi = grid.values[j];
    out[j].mean_s = means[j] = stats::mean(xs);
    out[j].var_s = stats::variance(xs);
  }
  for (std::size_t j = 0; j < m; ++j) {
    out[j].ds_dphi = central_difference(means, j, grid.spacing);
    out[j].delta_phi = std::sqrt(out[j].var_s) / std::abs(out[j].ds_dphi);
    out[j].m = out[j].delta_phi * std::sqrt(n_total);
  }
  return out;
}

std::vector<ConfidenceInterval> bootstrap_ci(const Eigen::MatrixXd& signals, const PhiGrid& grid,
                                             double n_total, const BootstrapOptions& options) {
  grid.validate();
  if (options.resamples < 100) throw std::invalid_argument("bootstrap_ci: need at least 100 resamples");
  if (!(options.level > 0 && options.level < 1)) throw std::invalid_argument("bootstrap_ci: level must lie in (0, 1)");
  const auto n = static_cast<std::size_t>(signals.rows());
  const auto m = static_cast<std::size_t>(signals.cols());
  if (n < 2) throw std::invalid_argument("bootstrap_ci: too few samples");
  if (m != grid.size()) throw std::invalid_argument("bootstrap_ci: column count does not match grid");

  Eigen::MatrixXd merit(static_cast<Eigen::Index>(options.resamples), static_cast<Eigen::Index>(m));
  for (std::size_t b = 0; b < options.resamples; ++b) {
    const CounterRng rng(detail::stream_key(options.seed, b, 0xb0075742ULL));
    std::vector<std::size_t> idx(n);
    for (std::size_t k = 0; k < n; ++k) idx[k] = static_cast<std::size_t>(rng.index(k, n));

    std::vector<double> means(m);
    std::vector<double> vars(m);
    for (std::size_t j = 0; j < m; ++j) {
      const auto col = signals.col(static_cast<Eigen::Index>(j));
      double acc = 0;
      for (std::size_t k : idx) acc += col(static_cast<Eigen::Index>(k));
      const double mean = acc / static_cast<double>(n);
      double sq = 0;
      for (std::size_t k : idx) {
        const double d = col(static_cast<Eigen::Index>(k)) - mean;
        sq += d * d;
      }
      means[j] = mean;
      vars[j] = sq / static_cast<double>(n - 1);
    }
    for (std::size_t j = 0; j < m; ++j) {
      merit(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) =
          figure_of_merit(vars[j], central_difference(means, j, grid.spacing), n_total);
    }
  }

  std::vector<ConfidenceInterval> out(m);
  const double tail = (1.0 - options.level) / 2.0;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> values;
    values.reserve(options.resamples);
    for (std::size_t b = 0; b < options.resamples; ++b) {
      const double v = merit(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
      if (std::isfinite(v)) values.push_back(v);
    }
    // Flag M as undefined when more than 5% of resamples have zero slope.
    if (values.size() * 20 < options.resamples * 19 || values.size() < 2) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out[j] = {nan, nan, false};
      continue;
    }
    std::sort(values.begin(), values.end());
    out[j] = {percentile(values, tail), percentile(values, 1.0 - tail), true};
  }
  return out;
}

SignalTables signal_tables(const EnsembleAtT1& ensemble, const PhiGrid& grid, const HomodyneSpec& spec,
                           bool correction_on, unsigned threads) {
  const auto n = static_cast<Eigen::Index>(ensemble.size());
  const auto m = static_cast<Eigen::Index>(grid.size());
  SignalTables t{Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m)};
  parallel_for(ensemble.size(), threads, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto sample = measure(ensemble.states[i], grid.values[static_cast<std::size_t>(j)], spec,
                                  ensemble.lo_noise[i], correction_on);
      t.s_a(row, j) = sample.s_a;
      t.s_b(row, j) = sample.s_b;
      t.s(row, j) = sample.s_combined;
    }
  });
  return t;
}

SensitivityCurve sensitivity_curve(const EnsembleAtT1& ensemble, const PhiGrid& grid,
                                   const HomodyneSpec& spec, double n_total, bool correction_on,
                                   const BootstrapOptions& bootstrap, unsigned threads) {
  if (ensemble.size() < 100) throw std::invalid_argument("sensitivity_curve: ensemble must hold >= 100 trajectories");
  grid.validate();
  if (correction_on) sign_value(spec.correction_sign);

  const SignalTables tables = signal_tables(ensemble, grid, spec, correction_on, threads);
  SensitivityCurve curve;
  curve.points = curve_from_signals(tables.s, grid, n_total);
  curve.traj_count = ensemble.size();
  curve.n_total = n_total;
  curve.correction_on = correction_on;
  curve.sign = correction_on ? spec.correction_sign : CorrectionSign::plus;

  const auto cis = bootstrap_ci(tables.s, grid, n_total, bootstrap);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const std::span<const double> sa(tables.s_a.col(col).data(), ensemble.size());
    const std::span<const double> sb(tables.s_b.col(col).data(), ensemble.size());
    curve.points[j].mean_s_a = stats::mean(sa);
    curve.points[j].var_s_a = stats::variance(sa);
    curve.points[j].mean_s_b = stats::mean(sb);
    curve.points[j].ci_m = cis[j];
  }
  return curve;
}

HomodyneSpec resolve_homodyne(const EnsembleAtT1& ensemble, const RunConfig& config, double phi_ref) {
  HomodyneSpec spec = homodyne_for(ensemble, config.gain_g, config.lo_sampled, CorrectionSign::plus);
  if (config.correction == CorrectionMode::auto_sign) {
    spec.correction_sign = calibrate_correction_sign(ensemble, phi_ref, spec);
  }
  return spec;
}

RScan optimum_over_r(const std::vector<double>& r_values, const RunConfig& config, unsigned threads) {
  if (r_values.empty()) throw std::invalid_argument("optimum_over_r: empty r list");
  for (double r : r_values) {
    if (!std::isfinite(r) || r < 0) throw std::invalid_argument("optimum_over_r: r values must be >= 0");
  }
  config.validate();
  const bool correction_on = config.correction != CorrectionMode::off;
  const double phi_ref = std::numbers::pi / 2;

  RScan scan;
  for (double r : r_values) {
    RScanRow row;
    row.r = r;
    const auto p = analytics::predict(r, config.n_total);
    row.m_plain_analytic = p.m_plain;
    row.m_recycled_analytic = p.m_recycled;

    if (config.mode == EvolutionMode::analytic) {
      row.m = correction_on ? p.m_recycled : p.m_plain;
      row.ci_m = {row.m, row.m, true};
      row.m_uncorrected = p.m_plain;
      const double c = std::cosh(r);
      const double s = std::sinh(r);
      row.transferred = config.n_seed * c * c + s * s - config.n_seed;
      row.var_squeezed = p.var_squeezed_combo;
      row.var_antisqueezed = p.var_antisqueezed_combo;
    } else {
      const auto ensemble = build_ensemble(config.ensemble_spec(r), threads);
      const HomodyneSpec spec = resolve_homodyne(ensemble, config, phi_ref);
      const auto grid = PhiGrid::around(phi_ref, kDerivativeSpacing);
      const auto tables = signal_tables(ensemble, grid, spec, correction_on, threads);
      const auto pts = curve_from_signals(tables.s, grid, config.n_total);
      const auto plain = curve_from_signals(tables.s_a, grid, config.n_total);
      const auto cis = bootstrap_ci(tables.s, grid, config.n_total,
                                    {config.bootstrap_resamples, config.ci_level, config.master_seed});
      row.m = pts[1].m;
      row.ci_m = cis[1];
      row.m_uncorrected = plain[1].m;
      row.sign = spec.correction_sign;
      row.transferred = transferred_atoms(ensemble, config.n_seed);
      const auto q = quadrature_variances(ensemble);
      row.var_squeezed = q.squeezed;
      row.var_antisqueezed = q.antisqueezed;
      row.conservation = ensemble.conservation;
    }
    scan.rows.push_back(row);
  }

  std::size_t best = 0;
  std::size_t quiet = 0;
  for (std::size_t i = 0; i < scan.rows.size(); ++i) {
    const auto& row = scan.rows[i];
    if (std::isfinite(row.m) && (!std::isfinite(scan.rows[best].m) || row.m < scan.rows[best].m)) best = i;
    if (row.var_squeezed < scan.rows[quiet].var_squeezed) quiet = i;
  }
  auto& opt = scan.optimum;
  opt.r_star = scan.rows[best].r;
  opt.m_star = scan.rows[best].m;
  opt.atoms_transferred_at_star = scan.rows[best].transferred;
  opt.equivalent_atom_gain = 1.0 / (opt.m_star * opt.m_star);
  opt.at_boundary = scan.rows.size() > 1 && (best == 0 || best + 1 == scan.rows.size());
  opt.r_correlation_star = scan.rows[quiet].r;
  opt.transferred_at_correlation_star = scan.rows[quiet].transferred;
  return scan;
}

}  // namespace twi
