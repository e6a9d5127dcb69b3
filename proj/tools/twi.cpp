// twi: batch driver for truncated-Wigner interferometry experiments.

#include "twi/commands.hpp"
#include "twi/config.hpp"
#include "twi/dynamics.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

void report_error(const std::string& kind, const std::string& key, const std::string& message) {
  nlohmann::ordered_json err;
  err["error"] = kind;
  if (!key.empty()) err["key"] = key;
  err["message"] = message;
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated-Wigner simulator for atom interferometry with information-recycling beam splitters"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string replay_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out_dir = ".";
  std::optional<std::string> format;
  std::vector<std::string> overrides;
  bool figures = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value configuration file");
    cmd->add_option("--replay", replay_path, "re-run from the config embedded in an output file");
    cmd->add_option("--seed", seed, "master seed (overrides config)");
    cmd->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--set", overrides, "override one config key, e.g. --set r=2.5");
  };
  add_common(&app);
  app.add_flag("--figures", figures, "run the bundled recipe set (both r-scans and the r = 3 working point)");

  struct Verb {
    const char* name;
    const char* help;
    int (*run)(const twi::RunConfig&, const twi::cli::CommandOptions&);
  };
  const std::vector<Verb> verbs = {
      {"phi-sweep", "sensitivity versus interferometer phase at one r", twi::cli::cmd_phi_sweep},
      {"r-scan", "sensitivity at phi = pi/2 over r_list, with the optimum", twi::cli::cmd_r_scan},
      {"scatter", "per-trajectory S_a, S_b/g and S at scatter_phis", twi::cli::cmd_correlation_scatter},
      {"feasibility", "spontaneous-emission and seed-scaling estimates", twi::cli::cmd_feasibility},
      {"analytic-table", "closed-form predictions over r_list", twi::cli::cmd_analytic_table},
  };
  std::vector<CLI::App*> subs;
  for (const auto& v : verbs) {
    auto* sub = app.add_subcommand(v.name, v.help);
    add_common(sub);
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    twi::RunConfig config;
    if (!replay_path.empty()) config = twi::config_from_output(replay_path);
    if (!config_path.empty()) config = twi::load_config(config_path, config);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw twi::ConfigError(kv, "override must look like key=value");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) config.master_seed = *seed;
    if (format) config.set("output_format", *format);
    config.validate();

    const twi::cli::CommandOptions options{out_dir, threads};
    if (figures) return twi::cli::cmd_figures(config, options);
    for (std::size_t i = 0; i < verbs.size(); ++i) {
      if (subs[i]->parsed()) {
        const int rc = verbs[i].run(config, options);
        if (rc == twi::cli::kExitConservation) {
          report_error("conservation", "", "relative conservation drift exceeded the limit");
        }
        return rc;
      }
    }
    std::cerr << app.help() << "\n";
    return twi::cli::kExitConfigError;
  } catch (const twi::ConfigError& e) {
    report_error("config", e.key(), e.what());
    return twi::cli::kExitConfigError;
  } catch (const twi::IntegrationError& e) {
    report_error("integration", "", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("runtime", "", e.what());
    return 1;
  }
}
