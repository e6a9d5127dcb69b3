#include "twi/commands.hpp"

#include "twi/analytics.hpp"
#include "twi/ensemble.hpp"
#include "twi/estimator.hpp"
#include "twi/feasibility.hpp"
#include "twi/stats.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace twi::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json number(double x) {
  // NaN and infinity have no JSON literal.
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json config_json(const RunConfig& config) {
  Json out = Json::object();
  for (const auto& [k, v] : config.resolved()) out[k] = v;
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

fs::path write_summary(const fs::path& dir, const std::string& stem, const RunConfig& config,
                       const std::string& command, Json body) {
  Json doc = Json::object();
  doc["command"] = command;
  doc["master_seed"] = config.master_seed;
  doc["config"] = config_json(config);
  for (auto& [k, v] : body.items()) doc[k] = v;
  const fs::path path = dir / (stem + "_summary.json");
  write_text(path, doc.dump(2) + "\n");
  return path;
}

Json conservation_json(const ConservationReport& report) {
  return Json{{"max_rel_drift_atoms", number(report.max_rel_drift_atoms)},
              {"max_rel_drift_manley_rowe", number(report.max_rel_drift_manley_rowe)}};
}

bool drift_exceeded(const ConservationReport& report) {
  return report.max_rel_drift_atoms > kDriftLimit || report.max_rel_drift_manley_rowe > kDriftLimit;
}

std::string sign_name(CorrectionSign s) {
  switch (s) {
    case CorrectionSign::plus: return "plus";
    case CorrectionSign::minus: return "minus";
    case CorrectionSign::automatic: return "auto";
  }
  return "?";
}

BootstrapOptions bootstrap_options(const RunConfig& config) {
  return {config.bootstrap_resamples, config.ci_level, config.master_seed};
}

}  // namespace

fs::path write_table(const fs::path& dir, const std::string& stem, const RunConfig& config,
                     const std::string& command, const Table& table) {
  if (config.output_format == OutputFormat::csv) {
    std::string text;
    text += "# command: " + command + "\n";
    for (const auto& [k, v] : config.resolved()) text += "# config: " + k + " = " + v + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      text += (i ? "," : "") + table.columns[i];
    }
    text += "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        text += (i ? "," : "") + format_number(row[i]);
      }
      text += "\n";
    }
    const fs::path path = dir / (stem + ".csv");
    write_text(path, text);
    return path;
  }

  Json doc = Json::object();
  doc["command"] = command;
  doc["config"] = config_json(config);
  doc["columns"] = table.columns;
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (double x : row) r.push_back(number(x));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  const fs::path path = dir / (stem + ".json");
  write_text(path, doc.dump(2) + "\n");
  return path;
}

int cmd_phi_sweep(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  const auto ensemble = build_ensemble(config.ensemble_spec(config.r), options.threads);
  const auto spec = resolve_homodyne(ensemble, config);
  const auto grid = PhiGrid::uniform(config.phi_start, config.phi_stop, config.phi_count);
  const bool correction_on = config.correction != CorrectionMode::off;
  const auto curve = sensitivity_curve(ensemble, grid, spec, config.n_total, correction_on,
                                       bootstrap_options(config), options.threads);

  Table table;
  table.columns = {"phi", "mean_s_a", "var_s_a", "mean_s_b", "mean_s", "var_s",
                   "ds_dphi", "delta_phi", "m", "m_ci_lo", "m_ci_hi"};
  for (const auto& p : curve.points) {
    table.rows.push_back({p.phi, p.mean_s_a, p.var_s_a, p.mean_s_b, p.mean_s, p.var_s, p.ds_dphi,
                          p.delta_phi, p.m, p.ci_m.lo, p.ci_m.hi});
  }
  write_table(options.out_dir, "phi_sweep", config, "phi-sweep", table);

  const auto& best = curve.points[curve.argmin_m()];
  const auto& half_pi = curve.at(std::numbers::pi / 2);
  Json body;
  body["min_m"] = number(best.m);
  body["argmin_phi"] = number(best.phi);
  body["min_m_ci"] = Json::array({number(best.ci_m.lo), number(best.ci_m.hi)});
  body["m_at_half_pi"] = number(half_pi.m);
  body["m_at_half_pi_ci"] = Json::array({number(half_pi.ci_m.lo), number(half_pi.ci_m.hi)});
  body["transferred_atoms"] = number(transferred_atoms(ensemble, config.n_seed));
  body["lo_amplitude"] = number(spec.lo_amplitude);
  body["correction_sign"] = correction_on ? sign_name(spec.correction_sign) : "off";
  body["trajectories"] = curve.traj_count;
  body["conservation"] = conservation_json(ensemble.conservation);
  body["conservation_ok"] = !drift_exceeded(ensemble.conservation);
  write_summary(options.out_dir, "phi_sweep", config, "phi-sweep", body);
  return drift_exceeded(ensemble.conservation) ? kExitConservation : kExitOk;
}

int cmd_r_scan(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  const auto scan = optimum_over_r(config.r_list, config, options.threads);

  Table table;
  table.columns = {"r", "m", "m_ci_lo", "m_ci_hi", "m_uncorrected", "transferred_atoms",
                   "var_squeezed", "var_antisqueezed", "var_squeezed_analytic",
                   "m_plain_analytic", "m_recycled_analytic", "correction_sign",
                   "drift_atoms", "drift_manley_rowe"};
  ConservationReport worst;
  for (const auto& row : scan.rows) {
    table.rows.push_back({row.r, row.m, row.ci_m.lo, row.ci_m.hi, row.m_uncorrected, row.transferred,
                          row.var_squeezed, row.var_antisqueezed, 2.0 * std::exp(-2.0 * row.r),
                          row.m_plain_analytic, row.m_recycled_analytic,
                          row.sign == CorrectionSign::minus ? -1.0 : 1.0,
                          row.conservation.max_rel_drift_atoms, row.conservation.max_rel_drift_manley_rowe});
    worst.merge(row.conservation);
  }
  write_table(options.out_dir, "r_scan", config, "r-scan", table);

  const auto& opt = scan.optimum;
  Json body;
  body["r_star"] = number(opt.r_star);
  body["m_star"] = number(opt.m_star);
  body["atoms_transferred_at_star"] = number(opt.atoms_transferred_at_star);
  body["equivalent_atom_gain"] = number(opt.equivalent_atom_gain);
  body["at_boundary"] = opt.at_boundary;
  body["r_correlation_star"] = number(opt.r_correlation_star);
  body["transferred_at_correlation_star"] = number(opt.transferred_at_correlation_star);
  body["conservation"] = conservation_json(worst);
  body["conservation_ok"] = !drift_exceeded(worst);
  write_summary(options.out_dir, "r_scan", config, "r-scan", body);
  return drift_exceeded(worst) ? kExitConservation : kExitOk;
}

int cmd_correlation_scatter(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  const auto ensemble = build_ensemble(config.ensemble_spec(config.r), options.threads);
  const auto spec = resolve_homodyne(ensemble, config);
  const double sign = config.correction == CorrectionMode::off ? 1.0 : sign_value(spec.correction_sign);

  Table table;
  table.columns = {"trajectory", "phi", "s_a", "s_b_over_g", "s"};
  Json correlations = Json::array();
  for (double phi : config.scatter_phis) {
    const auto samples = signals_at(ensemble, phi, spec, true);
    std::vector<double> sa(samples.size());
    std::vector<double> sb(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      sa[i] = samples[i].s_a;
      sb[i] = sign * samples[i].s_b / config.gain_g;
      table.rows.push_back({static_cast<double>(i), phi, sa[i], sb[i], sa[i] - sb[i]});
    }
    correlations.push_back(Json{{"phi", number(phi)}, {"corr_s_a_s_b_over_g", number(stats::pearson(sa, sb))}});
  }
  write_table(options.out_dir, "scatter", config, "scatter", table);

  Json body;
  body["correction_sign"] = sign_name(sign > 0 ? CorrectionSign::plus : CorrectionSign::minus);
  body["correlations"] = correlations;
  body["conservation"] = conservation_json(ensemble.conservation);
  body["conservation_ok"] = !drift_exceeded(ensemble.conservation);
  write_summary(options.out_dir, "scatter", config, "scatter", body);
  return drift_exceeded(ensemble.conservation) ? kExitConservation : kExitOk;
}

int cmd_feasibility(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  const auto setup = config.physical_setup();
  const double sigma = feasibility::condensate_width(setup);
  const double fraction = feasibility::capture_fraction(setup);
  const double ratio = feasibility::rate_ratio(setup);
  const double scaling = setup.n_seed > 0 ? feasibility::scaling_estimate(setup.n_seed, setup.n_total)
                                          : std::numeric_limits<double>::quiet_NaN();
  const bool valid = ratio >= feasibility::kSingleModeRatioThreshold;

  Table table;
  table.columns = {"sigma", "k_sigma", "capture_fraction", "rate_ratio", "scaling_estimate", "single_mode_valid"};
  const double k = 2.0 * std::numbers::pi / setup.wavelength;
  table.rows.push_back({sigma, k * sigma, fraction, ratio, scaling, valid ? 1.0 : 0.0});
  write_table(options.out_dir, "feasibility", config, "feasibility", table);

  Json body;
  body["condensate_width"] = number(sigma);
  body["capture_fraction"] = number(fraction);
  body["rate_ratio"] = number(ratio);
  body["scaling_estimate"] = number(scaling);
  body["single_mode_valid"] = valid;
  write_summary(options.out_dir, "feasibility", config, "feasibility", body);
  return kExitOk;
}

int cmd_analytic_table(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  Table table;
  table.columns = {"r", "m_plain", "m_recycled", "delta_phi_plain", "delta_phi_recycled",
                   "var_squeezed", "var_antisqueezed", "sql", "heisenberg"};
  const double sql = analytics::sql(config.n_total);
  const double hl = analytics::heisenberg(config.n_total);
  for (double r : config.r_list) {
    const auto p = analytics::predict(r, config.n_total);
    table.rows.push_back({r, p.m_plain, p.m_recycled, p.delta_phi_plain, p.delta_phi_recycled,
                          p.var_squeezed_combo, p.var_antisqueezed_combo, sql, hl});
  }
  write_table(options.out_dir, "analytic_table", config, "analytic-table", table);

  Json body;
  body["r_crit"] = number(analytics::r_crit());
  body["sql"] = number(sql);
  body["heisenberg"] = number(hl);
  write_summary(options.out_dir, "analytic_table", config, "analytic-table", body);
  return kExitOk;
}

std::vector<FigureRecipe> figure_recipes(const RunConfig& base) {
  std::vector<FigureRecipe> out;

  RunConfig unseeded = base;
  unseeded.n_seed = 0;
  unseeded.r_list.clear();
  for (int i = 0; i <= 24; ++i) unseeded.r_list.push_back(0.25 * i);
  out.push_back({"r_scan_unseeded", "r-scan", unseeded});

  RunConfig seeded = base;
  seeded.n_seed = 1e4;
  seeded.r_list.clear();
  for (int i = 0; i <= 18; ++i) seeded.r_list.push_back(0.25 * i);
  out.push_back({"r_scan_seeded", "r-scan", seeded});

  RunConfig working = base;
  working.n_seed = 1e4;
  working.r = 3.0;
  working.gain_g = 100.0;
  out.push_back({"working_point", "phi-sweep", working});
  out.push_back({"working_point", "scatter", working});
  return out;
}

int cmd_figures(const RunConfig& base, const CommandOptions& options) {
  int status = kExitOk;
  for (const auto& recipe : figure_recipes(base)) {
    CommandOptions sub = options;
    sub.out_dir = options.out_dir / recipe.name;
    int rc = kExitOk;
    if (recipe.command == "r-scan") rc = cmd_r_scan(recipe.config, sub);
    else if (recipe.command == "phi-sweep") rc = cmd_phi_sweep(recipe.config, sub);
    else if (recipe.command == "scatter") rc = cmd_correlation_scatter(recipe.config, sub);
    if (rc != kExitOk) status = rc;
  }
  return status;
}

}  // namespace twi::cli
