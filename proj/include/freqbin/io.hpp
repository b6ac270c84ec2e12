#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freqbin/beating.hpp"
#include "freqbin/counting.hpp"
#include "freqbin/estimation.hpp"

namespace freqbin::io {

// One flat key/value config file drives the whole pipeline; dotted keys group
// the parameters by subsystem. Defaults are the built-in paper profile.
struct ExperimentConfig {
  // pump
  double pump_lambda_nm{};
  double pump_power_mw{};
  double pump_phi_p_rad{};
  // source rates and arm efficiencies
  counting::SourceModel source{};
  double lambda_idler_nm{};
  // branch measurement: per-port efficiencies and leak floors
  counting::PortEfficiencies ports{};
  counting::BranchFloors floors{};
  // coincidence counting
  counting::CoincidenceConfig coincidence{};
  // beating synthesis
  double beating_span_ps{};
  double beating_step_ps{};
  double beating_counts_scale{};
  double beating_visibility{};
  double beating_envelope_rad_per_ps{};
  double beating_phase_rad{};
  // power scan synthesis
  int powerscan_points{};
  double powerscan_max_power_mw{};
  std::uint64_t seed{};
};

// Built-in configuration encoding the reference operating point of the
// source (pure antibunching preparation, 300 ps window, 10 s integration,
// branch means 22427/28560/155/157, CAR 1477 at 75.36 kHz coincidence).
std::string paper_profile_text();
ExperimentConfig paper_profile();

// Parses `key = value` lines ('#' comments allowed). Unknown keys, duplicate
// keys and malformed values throw ConfigError with the line and key.
ExperimentConfig parse_config(const std::string& text);

// Loads a config file; the literal name "paper-profile" resolves to the
// built-in profile.
ExperimentConfig load_config(const std::string& path_or_name);

void validate(const ExperimentConfig& config);

// Locale-independent shortest round-trip formatting (exact value recovery
// on parse, at least full precision where it matters).
std::string format_double(double value);

// FNV-1a over raw bytes; provenance fingerprint for report inputs.
std::uint64_t fnv1a(const std::string& bytes);
std::string hash_file(const std::string& path);

// --- CSV datasets (bit-exact headers) ---

// branch,counts,sigma  with branch in {aa, bb, ab, ba}
void write_branch_csv(const std::string& path, const counting::BranchCounts& counts);
counting::BranchCounts read_branch_csv(const std::string& path,
                                       double integration_time_s = 0.0);

// delay_ps,counts,sigma
void write_beating_csv(const std::string& path, const beating::BeatingDataset& data);
beating::BeatingDataset read_beating_csv(const std::string& path,
                                         double integration_time_per_point_s = 1.0);

// power_mw,singles_hz,sigma_hz
void write_power_scan_csv(const std::string& path,
                          const std::vector<estimation::PowerScanPoint>& points);
std::vector<estimation::PowerScanPoint> read_power_scan_csv(const std::string& path);

// --- JSON fit and report bundles ---

struct Provenance {
  std::string config_hash;
  std::uint64_t seed{};
  std::string tool_version;
};

struct FitReport {
  estimation::BeatingFit fit;
  beating::BeatingDataset data;
  Provenance provenance;
};

void write_fit_report(const std::string& path, const FitReport& report);
FitReport read_fit_report(const std::string& path);

struct PowerScanSection {
  estimation::PolynomialFit fit;
  std::vector<estimation::PowerScanPoint> points;
};

struct ReportBundle {
  counting::BranchCounts branch_counts;
  counting::RatioDb ratio_db;
  estimation::Stat balance;
  estimation::BeatingFit beating_fit;
  beating::BeatingDataset beating_data;
  estimation::DensityMatrix density;
  bool projected{false};
  estimation::Stat fidelity;
  estimation::BootstrapSummary bootstrap;
  std::optional<PowerScanSection> power_scan;
  Provenance provenance;
};

void write_report(const std::string& path, const ReportBundle& bundle);
ReportBundle read_report(const std::string& path);

// Two labeled 4x4 real-valued blocks: the real part then the imaginary part.
void write_density_csv(const std::string& path, const estimation::DensityMatrix& rho);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace freqbin::io
