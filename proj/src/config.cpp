#include "twi/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace twi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) throw ConfigError(std::string(key), "empty value");
  // Symbolic multiples of pi are accepted for phase keys, e.g. "pi/2", "1.5pi".
  auto pi_pos = s.find("pi");
  if (pi_pos != std::string::npos) {
    std::string coeff = s.substr(0, pi_pos);
    std::string rest = s.substr(pi_pos + 2);
    double c = 1.0;
    if (!coeff.empty() && coeff != "+") c = coeff == "-" ? -1.0 : parse_double(key, coeff);
    double div = 1.0;
    if (!rest.empty()) {
      if (rest[0] != '/') throw ConfigError(std::string(key), "cannot parse '" + s + "'");
      div = parse_double(key, rest.substr(1));
    }
    return c * std::numbers::pi / div;
  }
  double value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(std::string(key), "not a finite number: '" + s + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  Int value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(std::string(key), "not an integer: '" + s + "'");
  }
  return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (out.empty()) throw ConfigError(std::string(key), "empty list");
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(std::string(key), "not a boolean: '" + std::string(s) + "'");
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_number(xs[i]);
  }
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view to_string(CorrectionMode mode) {
  switch (mode) {
    case CorrectionMode::on: return "on";
    case CorrectionMode::off: return "off";
    case CorrectionMode::auto_sign: return "auto_sign";
  }
  return "?";
}

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

std::vector<double> RunConfig::default_r_list() {
  std::vector<double> out;
  for (int i = 0; i <= 24; ++i) out.push_back(0.25 * i);
  return out;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* message) {
    if (!ok) throw ConfigError(key, message);
  };
  require(std::isfinite(n_total) && n_total > 0, "n_total", "must be > 0");
  require(std::isfinite(n_seed) && n_seed >= 0 && n_seed < n_total, "n_seed", "need 0 <= n_seed < n_total");
  require(std::isfinite(r) && r >= 0, "r", "must be >= 0");
  require(!r_list.empty(), "r_list", "must not be empty");
  for (double x : r_list) require(std::isfinite(x) && x >= 0, "r_list", "entries must be >= 0");
  require(phi_count >= 3, "phi_grid", "needs at least 3 points");
  require(phi_stop > phi_start, "phi_grid", "stop must exceed start");
  require(std::isfinite(gain_g) && gain_g > 0, "gain_g", "must be > 0");
  require(trajectories >= 100, "trajectories", "must be >= 100");
  require(steps_per_unit_r >= 1, "steps_per_unit_r", "must be >= 1");
  require(std::isfinite(seed_phase), "seed_phase", "must be finite");
  require(bootstrap_resamples >= 100, "bootstrap_resamples", "must be >= 100");
  require(ci_level > 0 && ci_level < 1, "ci_level", "must lie in (0, 1)");
  require(!scatter_phis.empty(), "scatter_phis", "must not be empty");
  try {
    physical_setup().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("physical_setup", e.what());
  }
}

EnsembleSpec RunConfig::ensemble_spec(double r_value) const {
  EnsembleSpec spec;
  spec.n_total = n_total;
  spec.n_seed = n_seed;
  spec.r = r_value;
  spec.seed_phase = seed_phase;
  spec.trajectories = trajectories;
  spec.steps_per_unit_r = steps_per_unit_r;
  spec.master_seed = master_seed;
  spec.mode = mode;
  return spec;
}

feasibility::PhysicalSetup RunConfig::physical_setup() const {
  feasibility::PhysicalSetup s;
  s.atomic_mass = atomic_mass;
  s.radial_trap_freq = radial_trap_freq;
  s.wavelength = wavelength;
  s.n_seed = n_seed;
  s.n_total = n_total;
  return s;
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  return {
      {"n_total", format_number(n_total)},
      {"n_seed", format_number(n_seed)},
      {"r", format_number(r)},
      {"r_list", format_list(r_list)},
      {"phi_grid", format_number(phi_start) + ", " + format_number(phi_stop) + ", " +
                       std::to_string(phi_count)},
      {"gain_g", format_number(gain_g)},
      {"trajectories", std::to_string(trajectories)},
      {"steps_per_unit_r", std::to_string(steps_per_unit_r)},
      {"master_seed", std::to_string(master_seed)},
      {"mode", std::string(to_string(mode))},
      {"correction", std::string(to_string(correction))},
      {"lo_sampled", lo_sampled ? "true" : "false"},
      {"output_format", std::string(to_string(output_format))},
      {"seed_phase", format_number(seed_phase)},
      {"bootstrap_resamples", std::to_string(bootstrap_resamples)},
      {"ci_level", format_number(ci_level)},
      {"scatter_phis", format_list(scatter_phis)},
      {"atomic_mass", format_number(atomic_mass)},
      {"radial_trap_freq", format_number(radial_trap_freq)},
      {"wavelength", format_number(wavelength)},
  };
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : resolved()) out += k + " = " + v + "\n";
  return out;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const std::string k(key);
  if (key == "n_total") n_total = parse_double(key, value);
  else if (key == "n_seed") n_seed = parse_double(key, value);
  else if (key == "r") r = parse_double(key, value);
  else if (key == "r_list") r_list = parse_list(key, value);
  else if (key == "phi_grid") {
    const auto parts = parse_list(key, value);
    if (parts.size() != 3) throw ConfigError(k, "expected 'start, stop, count'");
    if (parts[2] < 0 || parts[2] != std::floor(parts[2])) throw ConfigError(k, "count must be a whole number");
    phi_start = parts[0];
    phi_stop = parts[1];
    phi_count = static_cast<std::size_t>(parts[2]);
  }
  else if (key == "gain_g") gain_g = parse_double(key, value);
  else if (key == "trajectories") trajectories = parse_int<std::size_t>(key, value);
  else if (key == "steps_per_unit_r") steps_per_unit_r = parse_int<int>(key, value);
  else if (key == "master_seed") master_seed = parse_int<std::uint64_t>(key, value);
  else if (key == "mode") {
    try {
      mode = parse_evolution_mode(trim(value));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(k, e.what());
    }
  }
  else if (key == "correction") {
    const auto v = trim(value);
    if (v == "on") correction = CorrectionMode::on;
    else if (v == "off") correction = CorrectionMode::off;
    else if (v == "auto_sign") correction = CorrectionMode::auto_sign;
    else throw ConfigError(k, "expected on|off|auto_sign");
  }
  else if (key == "lo_sampled") lo_sampled = parse_bool(key, value);
  else if (key == "output_format") {
    const auto v = trim(value);
    if (v == "csv") output_format = OutputFormat::csv;
    else if (v == "json") output_format = OutputFormat::json;
    else throw ConfigError(k, "expected csv|json");
  }
  else if (key == "seed_phase") seed_phase = parse_double(key, value);
  else if (key == "bootstrap_resamples") bootstrap_resamples = parse_int<std::size_t>(key, value);
  else if (key == "ci_level") ci_level = parse_double(key, value);
  else if (key == "scatter_phis") scatter_phis = parse_list(key, value);
  else if (key == "atomic_mass") atomic_mass = parse_double(key, value);
  else if (key == "radial_trap_freq") radial_trap_freq = parse_double(key, value);
  else if (key == "wavelength") wavelength = parse_double(key, value);
  else throw ConfigError(k, "unknown key");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

RunConfig config_from_output(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  RunConfig cfg;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto doc = nlohmann::ordered_json::parse(text);
    if (!doc.contains("config")) throw ConfigError("", "no embedded config in '" + path + "'");
    for (const auto& [k, v] : doc["config"].items()) cfg.set(k, v.get<std::string>());
    return cfg;
  }

  constexpr std::string_view prefix = "# config: ";
  bool found = false;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind(prefix, 0) != 0) {
      if (found) break;
      continue;
    }
    found = true;
    const std::string_view body = std::string_view(line).substr(prefix.size());
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", "malformed embedded config line");
    cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  if (!found) throw ConfigError("", "no embedded config in '" + path + "'");
  return cfg;
}

}  // namespace twi
