#include "doctest.h"

#include "twi/commands.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

using namespace twi;
using namespace twi::cli;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "twi_test_commands" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_header(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return line;
  }
  return {};
}

Json summary(const fs::path& p) { return Json::parse(slurp(p)); }

RunConfig small_config() {
  RunConfig c;
  c.trajectories = 200;
  c.steps_per_unit_r = 100;
  c.phi_count = 21;
  c.r_list = {0.0, 1.0, 2.0};
  c.r = 2.0;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TWI_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("every command writes its table and summary") {
  const auto dir = scratch("all");
  const auto c = small_config();
  CHECK(cmd_phi_sweep(c, {dir, 1}) == kExitOk);
  CHECK(cmd_r_scan(c, {dir, 1}) == kExitOk);
  CHECK(cmd_correlation_scatter(c, {dir, 1}) == kExitOk);
  CHECK(cmd_feasibility(c, {dir, 1}) == kExitOk);
  CHECK(cmd_analytic_table(c, {dir, 1}) == kExitOk);

  CHECK(csv_header(dir / "phi_sweep.csv") ==
        "phi,mean_s_a,var_s_a,mean_s_b,mean_s,var_s,ds_dphi,delta_phi,m,m_ci_lo,m_ci_hi");
  CHECK(csv_header(dir / "r_scan.csv") ==
        "r,m,m_ci_lo,m_ci_hi,m_uncorrected,transferred_atoms,var_squeezed,var_antisqueezed,"
        "var_squeezed_analytic,m_plain_analytic,m_recycled_analytic,correction_sign,drift_atoms,drift_manley_rowe");
  CHECK(csv_header(dir / "scatter.csv") == "trajectory,phi,s_a,s_b_over_g,s");
  CHECK(csv_header(dir / "feasibility.csv") ==
        "sigma,k_sigma,capture_fraction,rate_ratio,scaling_estimate,single_mode_valid");
  CHECK(csv_header(dir / "analytic_table.csv") ==
        "r,m_plain,m_recycled,delta_phi_plain,delta_phi_recycled,var_squeezed,var_antisqueezed,sql,heisenberg");

  const auto sweep = summary(dir / "phi_sweep_summary.json");
  CHECK(sweep["command"] == "phi-sweep");
  CHECK(sweep["master_seed"] == c.master_seed);
  CHECK(sweep["config"]["trajectories"] == "200");
  CHECK(sweep["conservation_ok"] == true);
  CHECK(sweep["min_m"].get<double>() > 0);

  const auto scan = summary(dir / "r_scan_summary.json");
  CHECK(scan["r_star"].get<double>() == 2.0);
  CHECK(scan["at_boundary"] == true);

  const auto scatter = summary(dir / "scatter_summary.json");
  CHECK(scatter["correlations"].size() == 3);

  // 200 trajectories times 3 phases plus the header lines.
  std::ifstream in(dir / "scatter.csv");
  std::size_t data_lines = 0;
  for (std::string line; std::getline(in, line);) data_lines += !line.empty() && line[0] != '#';
  CHECK(data_lines == 1 + 200 * 3);
}

TEST_CASE("outputs do not depend on the thread count") {
  const auto one = scratch("threads1");
  const auto four = scratch("threads4");
  const auto c = small_config();
  cmd_phi_sweep(c, {one, 1});
  cmd_phi_sweep(c, {four, 4});
  cmd_r_scan(c, {one, 1});
  cmd_r_scan(c, {four, 4});
  for (const char* f : {"phi_sweep.csv", "phi_sweep_summary.json", "r_scan.csv", "r_scan_summary.json"}) {
    CAPTURE(f);
    CHECK(slurp(one / f) == slurp(four / f));
  }
}

TEST_CASE("replaying the embedded config reproduces the output") {
  for (auto format : {OutputFormat::csv, OutputFormat::json}) {
    const auto first = scratch("replay_a");
    const auto second = scratch("replay_b");
    auto c = small_config();
    c.output_format = format;
    c.master_seed = 424242;
    c.set("phi_grid", "0.1, 2pi, 11");
    cmd_phi_sweep(c, {first, 1});
    const auto table = first / (format == OutputFormat::csv ? "phi_sweep.csv" : "phi_sweep.json");
    const auto replayed = config_from_output(table.string());
    CHECK(replayed.resolved() == c.resolved());
    cmd_phi_sweep(replayed, {second, 1});
    CHECK(slurp(table) == slurp(second / table.filename()));
    CHECK(slurp(first / "phi_sweep_summary.json") == slurp(second / "phi_sweep_summary.json"));
  }
}

TEST_CASE("json tables") {
  const auto dir = scratch("json");
  auto c = small_config();
  c.output_format = OutputFormat::json;
  cmd_analytic_table(c, {dir, 1});
  const auto doc = summary(dir / "analytic_table.json");
  CHECK(doc["command"] == "analytic-table");
  CHECK(doc["columns"].size() == 9);
  CHECK(doc["rows"].size() == 3);
  CHECK(doc["rows"][0][1].get<double>() == 1.0);
}

TEST_CASE("uncorrected sweep without squeezing sits at the standard quantum limit") {
  const auto dir = scratch("sql");
  auto c = small_config();
  c.r = 0;
  c.correction = CorrectionMode::off;
  c.trajectories = 4000;
  c.phi_count = 41;
  cmd_phi_sweep(c, {dir, 1});
  const auto s = summary(dir / "phi_sweep_summary.json");
  CHECK(s["correction_sign"] == "off");
  CHECK(s["m_at_half_pi"].get<double>() == doctest::Approx(1.0).epsilon(0.08));
  CHECK(s["min_m"].get<double>() <= s["m_at_half_pi"].get<double>());
}

TEST_CASE("feasibility flag") {
  const auto dir = scratch("feasibility");
  auto c = small_config();
  cmd_feasibility(c, {dir, 1});
  CHECK(summary(dir / "feasibility_summary.json")["single_mode_valid"] == true);
  c.n_seed = 10;
  cmd_feasibility(c, {dir, 1});
  const auto s = summary(dir / "feasibility_summary.json");
  CHECK(s["single_mode_valid"] == false);
  CHECK(s["rate_ratio"].get<double>() == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("figure recipes") {
  const auto recipes = figure_recipes(RunConfig{});
  REQUIRE(recipes.size() == 4);
  CHECK(recipes[0].config.n_seed == 0);
  CHECK(recipes[0].config.r_list.back() == 6.0);
  CHECK(recipes[1].config.n_seed == 1e4);
  CHECK(recipes[2].config.r == 3.0);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  const std::string out = " --out \"" + dir.string() + "\"";
  CHECK(run_cli("analytic-table" + out) == kExitOk);
  CHECK(fs::exists(dir / "analytic_table.csv"));
  CHECK(run_cli("analytic-table --set bogus=1" + out) == kExitConfigError);
  CHECK(run_cli("phi-sweep --set trajectories=5" + out) == kExitConfigError);
  CHECK(run_cli("feasibility --format json --set n_seed=10" + out) == kExitOk);
  CHECK(fs::exists(dir / "feasibility.json"));
  CHECK(run_cli("analytic-table --replay \"" + (dir / "analytic_table.csv").string() + "\"" + out) == kExitOk);
  CHECK(run_cli("feasibility --config does-not-exist.conf" + out) == kExitConfigError);
}
