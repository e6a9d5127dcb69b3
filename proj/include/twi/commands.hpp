#pragma once

// Batch experiments behind the `twi` command-line tool. Each command writes
// its table (CSV or JSON) and a JSON summary into the output directory and
// returns the process exit code.

#include "twi/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace twi::cli {

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitConservation = 3;

// Relative conservation drift above which a run is reported as failed.
inline constexpr double kDriftLimit = 1e-6;

int cmd_phi_sweep(const RunConfig& config, const CommandOptions& options);
int cmd_r_scan(const RunConfig& config, const CommandOptions& options);
int cmd_correlation_scatter(const RunConfig& config, const CommandOptions& options);
int cmd_feasibility(const RunConfig& config, const CommandOptions& options);
int cmd_analytic_table(const RunConfig& config, const CommandOptions& options);

/// Runs the bundled recipe set: r-scans with and without a seed, and a
/// phi-sweep plus scatter at the seeded r = 3 working point.
int cmd_figures(const RunConfig& base, const CommandOptions& options);

struct FigureRecipe {
  std::string name;
  std::string command;
  RunConfig config;
};
std::vector<FigureRecipe> figure_recipes(const RunConfig& base);

/// Plain table with numeric cells, written with the resolved config embedded.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Writes `<stem>.csv` or `<stem>.json` according to config.output_format and
/// returns the path written.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const RunConfig& config, const std::string& command, const Table& table);

}  // namespace twi::cli
