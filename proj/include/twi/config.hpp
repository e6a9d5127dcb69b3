#pragma once

// Run configuration: flat `key = value` text with command-line overrides.

#include "twi/ensemble.hpp"
#include "twi/feasibility.hpp"

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace twi {

enum class CorrectionMode { on, off, auto_sign };
enum class OutputFormat { csv, json };

std::string_view to_string(CorrectionMode mode);
std::string_view to_string(OutputFormat format);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  double n_total = 1e7;
  double n_seed = 1e4;
  double r = 3.0;
  std::vector<double> r_list = default_r_list();
  double phi_start = 0.0;
  double phi_stop = 2.0 * std::numbers::pi;
  std::size_t phi_count = 201;
  double gain_g = 100.0;
  std::size_t trajectories = 1000;
  int steps_per_unit_r = 400;
  std::uint64_t master_seed = 20130101;
  EvolutionMode mode = EvolutionMode::tw;
  CorrectionMode correction = CorrectionMode::auto_sign;
  bool lo_sampled = true;
  OutputFormat output_format = OutputFormat::csv;
  double seed_phase = std::numbers::pi / 2;
  std::size_t bootstrap_resamples = 200;
  double ci_level = 0.95;
  std::vector<double> scatter_phis = {std::numbers::pi / 2, std::numbers::pi, 1.5 * std::numbers::pi};
  double atomic_mass = 1.443e-25;
  double radial_trap_freq = 1000.0;
  double wavelength = 780e-9;

  static std::vector<double> default_r_list();

  void validate() const;

  EnsembleSpec ensemble_spec(double r_value) const;
  feasibility::PhysicalSetup physical_setup() const;

  /// Every key with its resolved value, in a fixed order, numbers printed with
  /// 17 significant digits.
  std::vector<std::pair<std::string, std::string>> resolved() const;
  std::string to_text() const;

  /// Sets one key from its text form. Unknown keys throw.
  void set(std::string_view key, std::string_view value);
};

/// Applies `key = value` lines on top of `base`; `#` starts a comment.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Recovers the configuration embedded in an output file written by the CLI
/// (CSV comment header or the "config" object of a JSON file).
RunConfig config_from_output(const std::string& path);

std::string format_number(double x);

}  // namespace twi
