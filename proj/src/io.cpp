#include "freqbin/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "freqbin/constants.hpp"
#include "freqbin/errors.hpp"

namespace freqbin::io {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view view) {
  while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) {
    view.remove_prefix(1);
  }
  while (!view.empty() && (view.back() == ' ' || view.back() == '\t' || view.back() == '\r')) {
    view.remove_suffix(1);
  }
  return view;
}

double parse_double_or_throw(std::string_view text, int line, const std::string& field) {
  double value{};
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw SchemaError("expected a number, got '" + std::string(text) + "'", line, field);
  }
  return value;
}

std::int64_t parse_count_or_throw(std::string_view text, int line, const std::string& field) {
  std::int64_t value{};
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || value < 0) {
    throw SchemaError("expected a nonnegative integer, got '" + std::string(text) + "'",
                      line, field);
  }
  return value;
}

std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> fields;
  std::string current;
  for (const char c : row) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string hash_file(const std::string& path) {
  std::ostringstream hex;
  hex << "fnv1a:" << std::hex << fnv1a(read_text_file(path));
  return hex.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write file: " + path);
  }
  out << content;
}

// ---------------------------------------------------------------------------
// configuration

std::string paper_profile_text() {
  // Reference operating point: 10 mW pump generates 187.5 kHz of pairs;
  // arm efficiencies and the noise level put the coincidence measurement at
  // 75.36 kHz with CAR 1477 (accidentals 51.02 Hz in the 300 ps window);
  // branch means land on 22427/28560 with 155/157 leak floors.
  return
      "# Built-in reference profile\n"
      "pump.lambda_nm = 1540.56\n"
      "pump.power_mw = 10\n"
      "pump.phi_p_rad = 1.5707963267948966\n"
      "source.pair_coefficient_hz_per_mw2 = 1875\n"
      "source.noise_coefficient_hz_per_mw = 29346.196851655306\n"
      "source.collection_efficiency_signal = 0.6337569670885941\n"
      "source.collection_efficiency_idler = 0.6337569670885941\n"
      "source.dark_rate_hz = 100\n"
      "source.lambda_idler_nm = 1531.9\n"
      "branch.eta_signal_a = 0.16\n"
      "branch.eta_signal_b = 0.16\n"
      "branch.eta_idler_a = 0.1904\n"
      "branch.eta_idler_b = 0.14951333333333333\n"
      "branch.floor_aa = 155\n"
      "branch.floor_bb = 157\n"
      "branch.floor_ab = 0\n"
      "branch.floor_ba = 0\n"
      "coincidence.window_ps = 300\n"
      "coincidence.integration_time_s = 10\n"
      "beating.span_ps = 10\n"
      "beating.step_ps = 0.02\n"
      "beating.counts_scale = 1000\n"
      "beating.visibility = 0.96\n"
      "beating.envelope_rad_per_ps = 0.6283185307179586\n"
      "beating.phase_rad = 0\n"
      "powerscan.points = 10\n"
      "powerscan.max_power_mw = 10\n"
      "seed = 20230815\n";
}

ExperimentConfig paper_profile() { return parse_config(paper_profile_text()); }

namespace {

struct ConfigEntry {
  std::string value;
  int line{};
  bool consumed{false};
};

class ConfigReader {
 public:
  explicit ConfigReader(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
      ++line_number;
      const std::string_view body = trim(line);
      if (body.empty() || body.front() == '#') {
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("expected 'key = value'", line_number, std::string(body));
      }
      const std::string key{trim(body.substr(0, eq))};
      const std::string value{trim(body.substr(eq + 1))};
      if (key.empty() || value.empty()) {
        throw ConfigError("expected 'key = value'", line_number, key);
      }
      if (entries_.count(key) != 0) {
        throw ConfigError("duplicate key", line_number, key);
      }
      entries_[key] = {value, line_number, false};
    }
  }

  double number(const std::string& key, double fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      return fallback;
    }
    it->second.consumed = true;
    double value{};
    const auto& text = it->second.value;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
      throw ConfigError("expected a number, got '" + text + "'", it->second.line, key);
    }
    return value;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      return fallback;
    }
    it->second.consumed = true;
    std::uint64_t value{};
    const auto& text = it->second.value;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
      throw ConfigError("expected a nonnegative integer, got '" + text + "'",
                        it->second.line, key);
    }
    return value;
  }

  void reject_unknown_keys() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.consumed) {
        throw ConfigError("unknown key", entry.line, key);
      }
    }
  }

 private:
  std::unordered_map<std::string, ConfigEntry> entries_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  const ExperimentConfig defaults = []() {
    // Defaults are the profile values; a partial config overrides what it names.
    static const std::string profile = paper_profile_text();
    ConfigReader reader(profile);
    ExperimentConfig c;
    c.pump_lambda_nm = reader.number("pump.lambda_nm", 0);
    c.pump_power_mw = reader.number("pump.power_mw", 0);
    c.pump_phi_p_rad = reader.number("pump.phi_p_rad", 0);
    c.source.pair_coefficient_hz_per_mw2 = reader.number("source.pair_coefficient_hz_per_mw2", 0);
    c.source.noise_coefficient_hz_per_mw = reader.number("source.noise_coefficient_hz_per_mw", 0);
    c.source.collection_efficiency_signal = reader.number("source.collection_efficiency_signal", 0);
    c.source.collection_efficiency_idler = reader.number("source.collection_efficiency_idler", 0);
    c.source.dark_rate_hz = reader.number("source.dark_rate_hz", 0);
    c.lambda_idler_nm = reader.number("source.lambda_idler_nm", 0);
    c.ports.signal_a = reader.number("branch.eta_signal_a", 0);
    c.ports.signal_b = reader.number("branch.eta_signal_b", 0);
    c.ports.idler_a = reader.number("branch.eta_idler_a", 0);
    c.ports.idler_b = reader.number("branch.eta_idler_b", 0);
    c.floors.aa = reader.number("branch.floor_aa", 0);
    c.floors.bb = reader.number("branch.floor_bb", 0);
    c.floors.ab = reader.number("branch.floor_ab", 0);
    c.floors.ba = reader.number("branch.floor_ba", 0);
    c.coincidence.window_ps = reader.number("coincidence.window_ps", 0);
    c.coincidence.integration_time_s = reader.number("coincidence.integration_time_s", 0);
    c.beating_span_ps = reader.number("beating.span_ps", 0);
    c.beating_step_ps = reader.number("beating.step_ps", 0);
    c.beating_counts_scale = reader.number("beating.counts_scale", 0);
    c.beating_visibility = reader.number("beating.visibility", 0);
    c.beating_envelope_rad_per_ps = reader.number("beating.envelope_rad_per_ps", 0);
    c.beating_phase_rad = reader.number("beating.phase_rad", 0);
    c.powerscan_points = static_cast<int>(reader.integer("powerscan.points", 0));
    c.powerscan_max_power_mw = reader.number("powerscan.max_power_mw", 0);
    c.seed = reader.integer("seed", 0);
    return c;
  }();

  ConfigReader reader(text);
  ExperimentConfig c = defaults;
  c.pump_lambda_nm = reader.number("pump.lambda_nm", defaults.pump_lambda_nm);
  c.pump_power_mw = reader.number("pump.power_mw", defaults.pump_power_mw);
  c.pump_phi_p_rad = reader.number("pump.phi_p_rad", defaults.pump_phi_p_rad);
  c.source.pair_coefficient_hz_per_mw2 = reader.number(
      "source.pair_coefficient_hz_per_mw2", defaults.source.pair_coefficient_hz_per_mw2);
  c.source.noise_coefficient_hz_per_mw = reader.number(
      "source.noise_coefficient_hz_per_mw", defaults.source.noise_coefficient_hz_per_mw);
  c.source.collection_efficiency_signal = reader.number(
      "source.collection_efficiency_signal", defaults.source.collection_efficiency_signal);
  c.source.collection_efficiency_idler = reader.number(
      "source.collection_efficiency_idler", defaults.source.collection_efficiency_idler);
  c.source.dark_rate_hz = reader.number("source.dark_rate_hz", defaults.source.dark_rate_hz);
  c.lambda_idler_nm = reader.number("source.lambda_idler_nm", defaults.lambda_idler_nm);
  c.ports.signal_a = reader.number("branch.eta_signal_a", defaults.ports.signal_a);
  c.ports.signal_b = reader.number("branch.eta_signal_b", defaults.ports.signal_b);
  c.ports.idler_a = reader.number("branch.eta_idler_a", defaults.ports.idler_a);
  c.ports.idler_b = reader.number("branch.eta_idler_b", defaults.ports.idler_b);
  c.floors.aa = reader.number("branch.floor_aa", defaults.floors.aa);
  c.floors.bb = reader.number("branch.floor_bb", defaults.floors.bb);
  c.floors.ab = reader.number("branch.floor_ab", defaults.floors.ab);
  c.floors.ba = reader.number("branch.floor_ba", defaults.floors.ba);
  c.coincidence.window_ps = reader.number("coincidence.window_ps", defaults.coincidence.window_ps);
  c.coincidence.integration_time_s =
      reader.number("coincidence.integration_time_s", defaults.coincidence.integration_time_s);
  c.beating_span_ps = reader.number("beating.span_ps", defaults.beating_span_ps);
  c.beating_step_ps = reader.number("beating.step_ps", defaults.beating_step_ps);
  c.beating_counts_scale = reader.number("beating.counts_scale", defaults.beating_counts_scale);
  c.beating_visibility = reader.number("beating.visibility", defaults.beating_visibility);
  c.beating_envelope_rad_per_ps =
      reader.number("beating.envelope_rad_per_ps", defaults.beating_envelope_rad_per_ps);
  c.beating_phase_rad = reader.number("beating.phase_rad", defaults.beating_phase_rad);
  c.powerscan_points =
      static_cast<int>(reader.integer("powerscan.points", defaults.powerscan_points));
  c.powerscan_max_power_mw =
      reader.number("powerscan.max_power_mw", defaults.powerscan_max_power_mw);
  c.seed = reader.integer("seed", defaults.seed);
  reader.reject_unknown_keys();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path_or_name) {
  if (path_or_name == "paper-profile") {
    return paper_profile();
  }
  return parse_config(read_text_file(path_or_name));
}

void validate(const ExperimentConfig& config) {
  if (!(config.pump_lambda_nm > 0.0) || !(config.lambda_idler_nm > 0.0)) {
    throw ValidationError("wavelengths must be positive");
  }
  if (!(config.pump_power_mw >= 0.0)) {
    throw ValidationError("pump power must be nonnegative");
  }
  if (config.pump_phi_p_rad < -kPi || config.pump_phi_p_rad > kPi) {
    throw ValidationError("pump.phi_p_rad must lie in [-pi, pi]");
  }
  counting::validate(config.source);
  counting::validate(config.ports);
  counting::validate(config.floors);
  counting::validate(config.coincidence);
  if (!(config.beating_span_ps > 0.0) || !(config.beating_step_ps > 0.0) ||
      config.beating_step_ps > config.beating_span_ps) {
    throw ValidationError("beating grid needs span > 0 and 0 < step <= span");
  }
  if (!(config.beating_counts_scale > 0.0)) {
    throw ValidationError("beating.counts_scale must be positive");
  }
  if (config.beating_visibility < 0.0 || config.beating_visibility > 1.0) {
    throw ValidationError("beating.visibility must lie in [0, 1]");
  }
  if (!(config.beating_envelope_rad_per_ps > 0.0)) {
    throw ValidationError("beating.envelope_rad_per_ps must be positive");
  }
  if (config.powerscan_points < 4) {
    throw ValidationError("powerscan.points must be >= 4");
  }
  if (!(config.powerscan_max_power_mw > 0.0)) {
    throw ValidationError("powerscan.max_power_mw must be positive");
  }
}

// ---------------------------------------------------------------------------
// CSV datasets

void write_branch_csv(const std::string& path, const counting::BranchCounts& counts) {
  std::ostringstream out;
  out << "branch,counts,sigma\n";
  out << "aa," << counts.n_aa << ',' << format_double(counts.sigma_aa) << '\n';
  out << "bb," << counts.n_bb << ',' << format_double(counts.sigma_bb) << '\n';
  out << "ab," << counts.n_ab << ',' << format_double(counts.sigma_ab) << '\n';
  out << "ba," << counts.n_ba << ',' << format_double(counts.sigma_ba) << '\n';
  write_text_file(path, out.str());
}

counting::BranchCounts read_branch_csv(const std::string& path, double integration_time_s) {
  const auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != "branch,counts,sigma") {
    throw SchemaError("expected header 'branch,counts,sigma'", 1, "header");
  }
  if (lines.size() < 5) {
    throw SchemaError("expected four branch rows aa, bb, ab, ba",
                      static_cast<int>(lines.size()), "branch");
  }
  static constexpr const char* kOrder[4] = {"aa", "bb", "ab", "ba"};
  counting::BranchCounts counts;
  std::int64_t* ns[4] = {&counts.n_aa, &counts.n_bb, &counts.n_ab, &counts.n_ba};
  double* sigmas[4] = {&counts.sigma_aa, &counts.sigma_bb, &counts.sigma_ab, &counts.sigma_ba};
  for (int i = 0; i < 4; ++i) {
    const int line_number = i + 2;
    const auto fields = split_csv_row(lines[static_cast<std::size_t>(i) + 1]);
    if (fields.size() != 3) {
      throw SchemaError("expected 3 fields", line_number, "row");
    }
    if (fields[0] != kOrder[i]) {
      throw SchemaError(std::string("expected branch '") + kOrder[i] + "'",
                        line_number, "branch");
    }
    *ns[i] = parse_count_or_throw(fields[1], line_number, "counts");
    *sigmas[i] = parse_double_or_throw(fields[2], line_number, "sigma");
    if (*sigmas[i] < 0.0) {
      throw SchemaError("sigma must be nonnegative", line_number, "sigma");
    }
  }
  for (std::size_t i = 5; i < lines.size(); ++i) {
    if (!trim(lines[i]).empty()) {
      throw SchemaError("unexpected extra row", static_cast<int>(i + 1), "row");
    }
  }
  counts.integration_time_s = integration_time_s;
  return counts;
}

void write_beating_csv(const std::string& path, const beating::BeatingDataset& data) {
  std::ostringstream out;
  out << "delay_ps,counts,sigma\n";
  for (std::size_t i = 0; i < data.delays_ps.size(); ++i) {
    out << format_double(data.delays_ps[i]) << ',' << data.counts[i] << ','
        << format_double(data.sigmas[i]) << '\n';
  }
  write_text_file(path, out.str());
}

beating::BeatingDataset read_beating_csv(const std::string& path,
                                         double integration_time_per_point_s) {
  const auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != "delay_ps,counts,sigma") {
    throw SchemaError("expected header 'delay_ps,counts,sigma'", 1, "header");
  }
  beating::BeatingDataset data;
  data.integration_time_per_point_s = integration_time_per_point_s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line_number = static_cast<int>(i + 1);
    if (trim(lines[i]).empty()) {
      continue;
    }
    const auto fields = split_csv_row(lines[i]);
    if (fields.size() != 3) {
      throw SchemaError("expected 3 fields", line_number, "row");
    }
    data.delays_ps.push_back(parse_double_or_throw(fields[0], line_number, "delay_ps"));
    data.counts.push_back(parse_count_or_throw(fields[1], line_number, "counts"));
    data.sigmas.push_back(parse_double_or_throw(fields[2], line_number, "sigma"));
  }
  if (data.delays_ps.size() < 5) {
    throw SchemaError("expected at least 5 data rows",
                      static_cast<int>(lines.size()), "row");
  }
  beating::validate(data);
  return data;
}

void write_power_scan_csv(const std::string& path,
                          const std::vector<estimation::PowerScanPoint>& points) {
  std::ostringstream out;
  out << "power_mw,singles_hz,sigma_hz\n";
  for (const auto& point : points) {
    out << format_double(point.power_mw) << ',' << format_double(point.singles_hz)
        << ',' << format_double(point.sigma_hz) << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<estimation::PowerScanPoint> read_power_scan_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != "power_mw,singles_hz,sigma_hz") {
    throw SchemaError("expected header 'power_mw,singles_hz,sigma_hz'", 1, "header");
  }
  std::vector<estimation::PowerScanPoint> points;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line_number = static_cast<int>(i + 1);
    if (trim(lines[i]).empty()) {
      continue;
    }
    const auto fields = split_csv_row(lines[i]);
    if (fields.size() != 3) {
      throw SchemaError("expected 3 fields", line_number, "row");
    }
    points.push_back({parse_double_or_throw(fields[0], line_number, "power_mw"),
                      parse_double_or_throw(fields[1], line_number, "singles_hz"),
                      parse_double_or_throw(fields[2], line_number, "sigma_hz")});
  }
  return points;
}

// ---------------------------------------------------------------------------
// JSON bundles

namespace {

ordered_json params_to_json(const beating::BeatingParams& params) {
  return {{"amplitude", params.amplitude},
          {"visibility", params.visibility},
          {"envelope_rad_per_ps", params.envelope},
          {"delta_omega_rad_per_ps", params.delta_omega},
          {"phase_rad", params.phase}};
}

beating::BeatingParams params_from_json(const ordered_json& j) {
  return {j.at("amplitude").get<double>(), j.at("visibility").get<double>(),
          j.at("envelope_rad_per_ps").get<double>(),
          j.at("delta_omega_rad_per_ps").get<double>(),
          j.at("phase_rad").get<double>()};
}

ordered_json errors_to_json(const estimation::ParameterErrors& errors) {
  return {{"amplitude", errors.amplitude},
          {"visibility", errors.visibility},
          {"envelope_rad_per_ps", errors.envelope},
          {"delta_omega_rad_per_ps", errors.delta_omega},
          {"phase_rad", errors.phase}};
}

estimation::ParameterErrors errors_from_json(const ordered_json& j) {
  return {j.at("amplitude").get<double>(), j.at("visibility").get<double>(),
          j.at("envelope_rad_per_ps").get<double>(),
          j.at("delta_omega_rad_per_ps").get<double>(),
          j.at("phase_rad").get<double>()};
}

ordered_json fit_to_json(const estimation::BeatingFit& fit) {
  return {{"params", params_to_json(fit.params)},
          {"uncertainties", errors_to_json(fit.errors)},
          {"reduced_chi_square", fit.reduced_chi_square},
          {"converged", fit.converged},
          {"iterations", fit.iterations}};
}

estimation::BeatingFit fit_from_json(const ordered_json& j) {
  estimation::BeatingFit fit;
  fit.params = params_from_json(j.at("params"));
  fit.errors = errors_from_json(j.at("uncertainties"));
  fit.reduced_chi_square = j.at("reduced_chi_square").get<double>();
  fit.converged = j.at("converged").get<bool>();
  fit.iterations = j.at("iterations").get<int>();
  return fit;
}

ordered_json dataset_to_json(const beating::BeatingDataset& data) {
  return {{"delays_ps", data.delays_ps},
          {"counts", data.counts},
          {"sigmas", data.sigmas},
          {"integration_time_per_point_s", data.integration_time_per_point_s}};
}

beating::BeatingDataset dataset_from_json(const ordered_json& j) {
  beating::BeatingDataset data;
  data.delays_ps = j.at("delays_ps").get<std::vector<double>>();
  data.counts = j.at("counts").get<std::vector<std::int64_t>>();
  data.sigmas = j.at("sigmas").get<std::vector<double>>();
  data.integration_time_per_point_s = j.at("integration_time_per_point_s").get<double>();
  return data;
}

ordered_json provenance_to_json(const Provenance& provenance) {
  return {{"config_hash", provenance.config_hash},
          {"seed", provenance.seed},
          {"tool_version", provenance.tool_version}};
}

Provenance provenance_from_json(const ordered_json& j) {
  return {j.at("config_hash").get<std::string>(), j.at("seed").get<std::uint64_t>(),
          j.at("tool_version").get<std::string>()};
}

ordered_json stat_to_json(const estimation::Stat& stat) {
  return {{"value", stat.mean}, {"sigma", stat.sigma}};
}

estimation::Stat stat_from_json(const ordered_json& j) {
  return {j.at("value").get<double>(), j.at("sigma").get<double>()};
}

ordered_json counts_to_json(const counting::BranchCounts& counts) {
  return {{"aa", counts.n_aa},       {"bb", counts.n_bb},
          {"ab", counts.n_ab},       {"ba", counts.n_ba},
          {"sigma_aa", counts.sigma_aa}, {"sigma_bb", counts.sigma_bb},
          {"sigma_ab", counts.sigma_ab}, {"sigma_ba", counts.sigma_ba},
          {"integration_time_s", counts.integration_time_s}};
}

counting::BranchCounts counts_from_json(const ordered_json& j) {
  counting::BranchCounts counts;
  counts.n_aa = j.at("aa").get<std::int64_t>();
  counts.n_bb = j.at("bb").get<std::int64_t>();
  counts.n_ab = j.at("ab").get<std::int64_t>();
  counts.n_ba = j.at("ba").get<std::int64_t>();
  counts.sigma_aa = j.at("sigma_aa").get<double>();
  counts.sigma_bb = j.at("sigma_bb").get<double>();
  counts.sigma_ab = j.at("sigma_ab").get<double>();
  counts.sigma_ba = j.at("sigma_ba").get<double>();
  counts.integration_time_s = j.at("integration_time_s").get<double>();
  return counts;
}

ordered_json polynomial_to_json(const estimation::PolynomialFit& fit) {
  return {{"quadratic", fit.quadratic},
          {"linear", fit.linear},
          {"constant", fit.constant},
          {"sigma_quadratic", fit.sigma_quadratic},
          {"sigma_linear", fit.sigma_linear},
          {"sigma_constant", fit.sigma_constant}};
}

estimation::PolynomialFit polynomial_from_json(const ordered_json& j) {
  estimation::PolynomialFit fit;
  fit.quadratic = j.at("quadratic").get<double>();
  fit.linear = j.at("linear").get<double>();
  fit.constant = j.at("constant").get<double>();
  fit.sigma_quadratic = j.at("sigma_quadratic").get<double>();
  fit.sigma_linear = j.at("sigma_linear").get<double>();
  fit.sigma_constant = j.at("sigma_constant").get<double>();
  return fit;
}

}  // namespace

void write_fit_report(const std::string& path, const FitReport& report) {
  ordered_json j;
  j["schema"] = "freqbin-fit/1";
  j["fit"] = fit_to_json(report.fit);
  j["data"] = dataset_to_json(report.data);
  j["provenance"] = provenance_to_json(report.provenance);
  write_text_file(path, j.dump(2) + "\n");
}

FitReport read_fit_report(const std::string& path) {
  const ordered_json j = ordered_json::parse(read_text_file(path));
  if (j.value("schema", "") != "freqbin-fit/1") {
    throw SchemaError("expected schema 'freqbin-fit/1'", 1, "schema");
  }
  FitReport report;
  report.fit = fit_from_json(j.at("fit"));
  report.data = dataset_from_json(j.at("data"));
  report.provenance = provenance_from_json(j.at("provenance"));
  return report;
}

void write_report(const std::string& path, const ReportBundle& bundle) {
  ordered_json j;
  j["schema"] = "freqbin-report/1";
  j["provenance"] = provenance_to_json(bundle.provenance);
  j["branch_counts"] = counts_to_json(bundle.branch_counts);
  j["ratio_db"] = {{"db", bundle.ratio_db.infinite ? 0.0 : bundle.ratio_db.db},
                   {"infinite", bundle.ratio_db.infinite}};
  j["balance"] = stat_to_json(bundle.balance);
  j["beating_fit"] = fit_to_json(bundle.beating_fit);
  j["beating_data"] = dataset_to_json(bundle.beating_data);

  std::vector<std::vector<double>> real(4, std::vector<double>(4));
  std::vector<std::vector<double>> imag(4, std::vector<double>(4));
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      real[r][c] = bundle.density.entries(r, c).real();
      imag[r][c] = bundle.density.entries(r, c).imag();
    }
  }
  j["density_matrix"] = {{"real", real},
                         {"imag", imag},
                         {"p", bundle.density.p},
                         {"visibility", bundle.density.visibility},
                         {"phase_rad", bundle.density.phase},
                         {"physical", bundle.density.physical},
                         {"projected", bundle.projected}};
  j["fidelity"] = stat_to_json(bundle.fidelity);
  j["bootstrap"] = {{"replicates", bundle.bootstrap.replicates},
                    {"seed", bundle.bootstrap.seed},
                    {"balance", stat_to_json(bundle.bootstrap.balance)},
                    {"visibility", stat_to_json(bundle.bootstrap.visibility)},
                    {"phase", stat_to_json(bundle.bootstrap.phase)},
                    {"fidelity", stat_to_json(bundle.bootstrap.fidelity)}};
  if (bundle.power_scan) {
    ordered_json points = ordered_json::array();
    for (const auto& point : bundle.power_scan->points) {
      points.push_back({{"power_mw", point.power_mw},
                        {"singles_hz", point.singles_hz},
                        {"sigma_hz", point.sigma_hz}});
    }
    j["power_scan"] = {{"fit", polynomial_to_json(bundle.power_scan->fit)},
                       {"points", points}};
  }
  write_text_file(path, j.dump(2) + "\n");
}

ReportBundle read_report(const std::string& path) {
  const ordered_json j = ordered_json::parse(read_text_file(path));
  if (j.value("schema", "") != "freqbin-report/1") {
    throw SchemaError("expected schema 'freqbin-report/1'", 1, "schema");
  }
  ReportBundle bundle;
  bundle.provenance = provenance_from_json(j.at("provenance"));
  bundle.branch_counts = counts_from_json(j.at("branch_counts"));
  bundle.ratio_db.infinite = j.at("ratio_db").at("infinite").get<bool>();
  bundle.ratio_db.db = bundle.ratio_db.infinite
                           ? std::numeric_limits<double>::infinity()
                           : j.at("ratio_db").at("db").get<double>();
  bundle.balance = stat_from_json(j.at("balance"));
  bundle.beating_fit = fit_from_json(j.at("beating_fit"));
  bundle.beating_data = dataset_from_json(j.at("beating_data"));

  const auto& dm = j.at("density_matrix");
  const auto real = dm.at("real").get<std::vector<std::vector<double>>>();
  const auto imag = dm.at("imag").get<std::vector<std::vector<double>>>();
  if (real.size() != 4 || imag.size() != 4) {
    throw SchemaError("density matrix blocks must be 4x4", 1, "density_matrix");
  }
  for (int r = 0; r < 4; ++r) {
    if (real[r].size() != 4 || imag[r].size() != 4) {
      throw SchemaError("density matrix blocks must be 4x4", 1, "density_matrix");
    }
    for (int c = 0; c < 4; ++c) {
      bundle.density.entries(r, c) = {real[r][c], imag[r][c]};
    }
  }
  bundle.density.p = dm.at("p").get<double>();
  bundle.density.visibility = dm.at("visibility").get<double>();
  bundle.density.phase = dm.at("phase_rad").get<double>();
  bundle.density.physical = dm.at("physical").get<bool>();
  bundle.projected = dm.at("projected").get<bool>();
  bundle.fidelity = stat_from_json(j.at("fidelity"));
  bundle.bootstrap.replicates = j.at("bootstrap").at("replicates").get<int>();
  bundle.bootstrap.seed = j.at("bootstrap").at("seed").get<std::uint64_t>();
  bundle.bootstrap.balance = stat_from_json(j.at("bootstrap").at("balance"));
  bundle.bootstrap.visibility = stat_from_json(j.at("bootstrap").at("visibility"));
  bundle.bootstrap.phase = stat_from_json(j.at("bootstrap").at("phase"));
  bundle.bootstrap.fidelity = stat_from_json(j.at("bootstrap").at("fidelity"));
  if (j.contains("power_scan")) {
    PowerScanSection section;
    section.fit = polynomial_from_json(j.at("power_scan").at("fit"));
    for (const auto& point : j.at("power_scan").at("points")) {
      section.points.push_back({point.at("power_mw").get<double>(),
                                point.at("singles_hz").get<double>(),
                                point.at("sigma_hz").get<double>()});
    }
    bundle.power_scan = std::move(section);
  }
  return bundle;
}

void write_density_csv(const std::string& path, const estimation::DensityMatrix& rho) {
  std::ostringstream out;
  out << "real\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out << format_double(rho.entries(r, c).real()) << (c == 3 ? '\n' : ',');
    }
  }
  out << "imag\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out << format_double(rho.entries(r, c).imag()) << (c == 3 ? '\n' : ',');
    }
  }
  write_text_file(path, out.str());
}

}  // namespace freqbin::io
