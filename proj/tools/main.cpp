// Command-line pipeline: simulate -> fit -> tomo -> report, plus verify.
// Exit codes: 0 success, 1 validation/schema, 2 non-convergence, 3 unphysical state.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "freqbin/acceptance.hpp"
#include "freqbin/beating.hpp"
#include "freqbin/constants.hpp"
#include "freqbin/counting.hpp"
#include "freqbin/errors.hpp"
#include "freqbin/estimation.hpp"
#include "freqbin/io.hpp"
#include "freqbin/plots.hpp"
#include "freqbin/rng.hpp"
#include "freqbin/statekit.hpp"

namespace fs = std::filesystem;
using namespace freqbin;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitUnphysical = 3;

struct SimulateArgs {
  std::string config = "paper-profile";
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& args) {
  io::ExperimentConfig config = io::load_config(args.config);
  if (args.seed) {
    config.seed = *args.seed;
  }
  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);

  // Branch counts from the state pipeline.
  const double phi0 = 2.0 * config.pump_phi_p_rad;
  const auto probs = statekit::branch_probabilities(
      statekit::fpbs_decompose(statekit::sagnac_state(phi0)));
  const double total_pairs =
      counting::pair_generation_rate(config.source, config.pump_power_mw) *
      config.coincidence.integration_time_s;
  const auto branch = counting::simulate_branch_counts(
      probs, total_pairs, config.ports, config.floors,
      rng::derive_seed(config.seed, 0), config.coincidence.integration_time_s);
  io::write_branch_csv((dir / "branch_counts.csv").string(), branch);

  // Beating interferogram; the carrier frequency comes from the wavelengths.
  const auto freqs =
      statekit::make_frequencies(config.pump_lambda_nm, config.lambda_idler_nm);
  const beating::BeatingParams params{
      config.beating_counts_scale, config.beating_visibility,
      config.beating_envelope_rad_per_ps, statekit::frequency_difference(freqs),
      config.beating_phase_rad};
  const auto delays = beating::delay_grid(config.beating_span_ps, config.beating_step_ps);
  const auto dataset = beating::synthesize_beating_dataset(
      params, delays, rng::derive_seed(config.seed, 1), 1.0);
  io::write_beating_csv((dir / "beating.csv").string(), dataset);

  // Idler-arm power scan.
  rng::RandomStream scan_stream(rng::derive_seed(config.seed, 2));
  std::vector<estimation::PowerScanPoint> points;
  const double integration = config.coincidence.integration_time_s;
  for (int i = 1; i <= config.powerscan_points; ++i) {
    const double power = config.powerscan_max_power_mw * i / config.powerscan_points;
    const double rate = counting::singles_rate(config.source, power, counting::Arm::Idler);
    const auto n = scan_stream.poisson(rate * integration);
    points.push_back(
        {power, static_cast<double>(n) / integration,
         std::sqrt(static_cast<double>(std::max<std::int64_t>(n, 1))) / integration});
  }
  io::write_power_scan_csv((dir / "power_scan.csv").string(), points);

  std::cout << "wrote " << (dir / "branch_counts.csv").string() << ", "
            << (dir / "beating.csv").string() << ", "
            << (dir / "power_scan.csv").string() << '\n';
  return kExitSuccess;
}

struct FitArgs {
  std::string beating_csv;
  std::string out_dir = ".";
  int max_iterations = 1000;
  double subtract_accidentals = 0.0;
};

int run_fit(const FitArgs& args) {
  const auto data = io::read_beating_csv(args.beating_csv);
  const auto guess = estimation::initial_guess(data);
  estimation::FitOptions options;
  options.max_iterations = args.max_iterations;
  options.subtract_accidental_counts = args.subtract_accidentals;
  const auto fit = estimation::fit_beating(data, guess, options);

  fs::create_directories(args.out_dir);
  const fs::path out_path = fs::path(args.out_dir) / "beating_fit.json";
  io::FitReport report{fit, data,
                       {io::hash_file(args.beating_csv), 0, kToolVersion}};
  io::write_fit_report(out_path.string(), report);
  std::cout << "wrote " << out_path.string() << '\n';
  if (!fit.converged) {
    std::cerr << "fit did not converge within " << args.max_iterations
              << " iterations; best parameters written\n";
    return kExitNonConvergence;
  }
  return kExitSuccess;
}

struct TomoArgs {
  std::string fit_json;
  std::string branch_csv;
  std::string power_scan_csv;
  std::string out_dir = ".";
  int bootstrap_replicates = 1000;
  std::uint64_t seed = 1;
  bool project_physical = false;
};

int run_tomo(const TomoArgs& args) {
  const auto fit_report = io::read_fit_report(args.fit_json);
  const auto branch = io::read_branch_csv(args.branch_csv);

  const auto balance = counting::balance_parameter(branch);
  const double p = balance.p;
  const double visibility = fit_report.fit.params.visibility;
  const double phase = fit_report.fit.params.phase;

  io::ReportBundle bundle;
  bundle.branch_counts = branch;
  bundle.ratio_db = counting::antibunch_bunch_ratio_db(branch);
  bundle.balance = {balance.p, balance.sigma};
  bundle.beating_fit = fit_report.fit;
  bundle.beating_data = fit_report.data;

  const bool in_range = visibility <= 1.0;
  const bool physical =
      in_range && estimation::physicality_margin(p, visibility) >= -1e-12;
  if (!physical && args.project_physical) {
    const double clipped = estimation::clip_visibility_physical(p, visibility);
    bundle.density = estimation::reconstruct_density(p, clipped, phase);
    bundle.projected = true;
    std::cerr << "visibility projected from " << visibility << " to " << clipped
              << " to restore physicality\n";
  } else {
    // Raw parameterized matrix; never silently repaired.
    bundle.density = estimation::density_from_parameters(p, visibility, phase);
  }

  bundle.bootstrap = estimation::propagate_uncertainties(
      branch, fit_report.fit, args.bootstrap_replicates, args.seed);
  bundle.fidelity = {estimation::fidelity_to_bell(bundle.density),
                     bundle.bootstrap.fidelity.sigma};
  bundle.provenance = {
      io::hash_file(args.fit_json) + "+" + io::hash_file(args.branch_csv),
      args.seed, kToolVersion};

  if (!args.power_scan_csv.empty()) {
    io::PowerScanSection section;
    section.points = io::read_power_scan_csv(args.power_scan_csv);
    section.fit = estimation::fit_power_scan(section.points);
    bundle.power_scan = std::move(section);
  }

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  io::write_report((dir / "report.json").string(), bundle);
  io::write_density_csv((dir / "density_matrix.csv").string(), bundle.density);
  std::cout << "wrote " << (dir / "report.json").string() << " and "
            << (dir / "density_matrix.csv").string() << '\n';

  if (!bundle.density.physical) {
    std::cerr << "state is unphysical: V/2 exceeds sqrt(p(1-p))\n";
    return kExitUnphysical;
  }
  return kExitSuccess;
}

struct ReportArgs {
  std::string report_json;
  std::string out_dir = ".";
};

int run_report(const ReportArgs& args) {
  const auto bundle = io::read_report(args.report_json);
  const auto result = plots::render_report(bundle, args.out_dir);
  for (const auto& warning : result.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
  std::cout << "wrote " << result.plots.size() << " plots and "
            << (result.files.size() - result.plots.size())
            << " data/summary files to " << args.out_dir << '\n';
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-bin entangled photon-pair source simulator and estimator"};
  app.require_subcommand(1);

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand(
      "simulate", "synthesize branch-count, beating and power-scan datasets");
  simulate->add_option("--config", simulate_args.config,
                       "config file path or the built-in 'paper-profile'");
  simulate->add_option("--seed", simulate_args.seed, "override the config seed");
  simulate->add_option("--out", simulate_args.out_dir, "output directory");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit the beating curve to a dataset");
  fit->add_option("csv", fit_args.beating_csv, "beating CSV path")->required();
  fit->add_option("--out", fit_args.out_dir, "output directory");
  fit->add_option("--max-iterations", fit_args.max_iterations, "optimizer iteration cap");
  fit->add_option("--subtract-accidentals", fit_args.subtract_accidentals,
                  "expected accidental counts per point to subtract before fitting");

  TomoArgs tomo_args;
  auto* tomo = app.add_subcommand(
      "tomo", "reconstruct the density matrix and propagate uncertainties");
  tomo->add_option("fit_json", tomo_args.fit_json, "fit JSON path")->required();
  tomo->add_option("branch_csv", tomo_args.branch_csv, "branch-counts CSV path")->required();
  tomo->add_option("--power-scan", tomo_args.power_scan_csv,
                   "optional power-scan CSV to include in the report");
  tomo->add_option("--out", tomo_args.out_dir, "output directory");
  tomo->add_option("--bootstrap", tomo_args.bootstrap_replicates, "bootstrap replicates");
  tomo->add_option("--seed", tomo_args.seed, "bootstrap seed");
  tomo->add_flag("--project-physical", tomo_args.project_physical,
                 "clip the visibility onto the physical boundary instead of failing");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "render plots and a summary from a report");
  report->add_option("report_json", report_args.report_json, "report JSON path")->required();
  report->add_option("--out", report_args.out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run the verification suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulate(simulate_args);
    }
    if (fit->parsed()) {
      return run_fit(fit_args);
    }
    if (tomo->parsed()) {
      return run_tomo(tomo_args);
    }
    if (report->parsed()) {
      return run_report(report_args);
    }
    if (verify->parsed()) {
      return acceptance::print_acceptance(std::cout) ? kExitSuccess : kExitValidation;
    }
  } catch (const DegenerateFitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
