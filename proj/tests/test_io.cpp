#include <charconv>
#include <cstdio>
#include <filesystem>
#include <string>

#include <doctest.h>

#include "freqbin/beating.hpp"
#include "freqbin/constants.hpp"
#include "freqbin/errors.hpp"
#include "freqbin/io.hpp"
#include "freqbin/plots.hpp"
#include "freqbin/rng.hpp"

using namespace freqbin;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "freqbin_io_test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

io::ReportBundle sample_bundle(bool with_power_scan) {
  io::ReportBundle bundle;
  bundle.branch_counts = {155, 157, 22427, 28560, 12.449899597988733,
                          12.529964086141668, 149.75646397897568,
                          168.99704731125838, 10.0};
  bundle.ratio_db = counting::antibunch_bunch_ratio_db(bundle.branch_counts);
  bundle.balance = {0.5601427814933219, 0.002198242012928329};
  bundle.beating_fit.params = {1000.0, 0.96, 0.6283185307179586, 13.8, 0.0};
  bundle.beating_fit.errors = {1.3, 0.0017, 0.0018, 0.0016, 0.0026};
  bundle.beating_fit.reduced_chi_square = 0.98;
  bundle.beating_fit.converged = true;
  bundle.beating_fit.iterations = 17;
  bundle.beating_data = beating::synthesize_beating_dataset(
      bundle.beating_fit.params, beating::delay_grid(10.0, 0.1), 12);
  bundle.density = estimation::reconstruct_density(0.56, 0.96, 0.0);
  bundle.fidelity = {0.98, 0.0305};
  bundle.bootstrap = {{0.56, 0.0022}, {0.96, 0.061}, {0.0, 0.01}, {0.98, 0.0305}, 1000, 7};
  if (with_power_scan) {
    io::PowerScanSection scan;
    for (int i = 1; i <= 6; ++i) {
      scan.points.push_back({1.0 * i, 1000.0 * i * i + 40.0 * i, 30.0 + i});
    }
    scan.fit = estimation::fit_power_scan(scan.points);
    bundle.power_scan = std::move(scan);
  }
  bundle.provenance = {"fnv1a:deadbeef", 42, kToolVersion};
  return bundle;
}

}  // namespace

TEST_CASE("format_double round-trips exactly and is locale independent") {
  rng::RandomStream stream(2718);
  for (int i = 0; i < 1000; ++i) {
    const double value = (stream.uniform() - 0.5) * std::pow(10.0, 30.0 * (stream.uniform() - 0.5));
    const std::string text = io::format_double(value);
    double parsed{};
    const auto result = std::from_chars(text.data(), text.data() + text.size(), parsed);
    REQUIRE(result.ec == std::errc{});
    CHECK(parsed == value);
    CHECK(text.find(',') == std::string::npos);
  }
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(-3.0) == "-3");
}

TEST_CASE("paper profile parses, validates and pins the operating point") {
  const auto config = io::paper_profile();
  CHECK(config.pump_lambda_nm == doctest::Approx(1540.56));
  CHECK(config.lambda_idler_nm == doctest::Approx(1531.90));
  CHECK(config.coincidence.window_ps == doctest::Approx(300.0));
  CHECK(config.coincidence.integration_time_s == doctest::Approx(10.0));
  CHECK(config.pump_phi_p_rad == doctest::Approx(kPi / 2));
  CHECK(config.seed == 20230815);
  // branch means
  const double pairs = config.source.pair_coefficient_hz_per_mw2 *
                       config.pump_power_mw * config.pump_power_mw *
                       config.coincidence.integration_time_s;
  CHECK(0.5 * pairs * config.ports.signal_a * config.ports.idler_b ==
        doctest::Approx(22427.0).epsilon(1e-9));
  CHECK(0.5 * pairs * config.ports.signal_b * config.ports.idler_a ==
        doctest::Approx(28560.0).epsilon(1e-9));
}

TEST_CASE("config parsing reports line and key diagnostics") {
  CHECK_THROWS_WITH_AS(io::parse_config("seed = abc\n"),
                       doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_WITH_AS(io::parse_config("pump.lambda_nm = 1540\nnot_a_key = 3\n"),
                       doctest::Contains("not_a_key"), ConfigError);
  CHECK_THROWS_WITH_AS(io::parse_config("seed = 1\nseed = 2\n"),
                       doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_AS(io::parse_config("just some words\n"), ConfigError);
  // range violations surface as validation errors
  CHECK_THROWS_AS(io::parse_config("source.collection_efficiency_signal = 1.5\n"),
                  ValidationError);
  CHECK_THROWS_AS(io::parse_config("beating.step_ps = 50\n"), ValidationError);
}

TEST_CASE("partial configs override profile defaults") {
  const auto config = io::parse_config("# comment line\nseed = 7\npump.power_mw = 4\n");
  CHECK(config.seed == 7);
  CHECK(config.pump_power_mw == doctest::Approx(4.0));
  CHECK(config.pump_lambda_nm == doctest::Approx(1540.56));  // untouched default
}

TEST_CASE("branch CSV round-trips bytes and values") {
  TempDir dir;
  const counting::BranchCounts counts{155, 157, 22427, 28560, 12.449899597988733,
                                      12.529964086141668, 149.75646397897568,
                                      168.99704731125838, 10.0};
  const auto path = dir.file("branch.csv");
  io::write_branch_csv(path, counts);
  const std::string bytes = io::read_text_file(path);
  CHECK(bytes.rfind("branch,counts,sigma\naa,155,", 0) == 0);

  const auto parsed = io::read_branch_csv(path, 10.0);
  CHECK(parsed.n_aa == counts.n_aa);
  CHECK(parsed.n_ba == counts.n_ba);
  CHECK(parsed.sigma_ab == counts.sigma_ab);
  CHECK(parsed.integration_time_s == doctest::Approx(10.0));

  io::write_branch_csv(dir.file("again.csv"), parsed);
  CHECK(io::read_text_file(dir.file("again.csv")) == bytes);
}

TEST_CASE("branch CSV schema errors name the line and field") {
  TempDir dir;
  io::write_text_file(dir.file("bad_header.csv"), "foo,bar\n");
  CHECK_THROWS_WITH_AS(io::read_branch_csv(dir.file("bad_header.csv")),
                       doctest::Contains("header"), SchemaError);

  io::write_text_file(dir.file("bad_branch.csv"),
                      "branch,counts,sigma\naa,1,1\nzz,2,1\nab,3,1\nba,4,1\n");
  CHECK_THROWS_WITH_AS(io::read_branch_csv(dir.file("bad_branch.csv")),
                       doctest::Contains("line 3"), SchemaError);

  io::write_text_file(dir.file("bad_count.csv"),
                      "branch,counts,sigma\naa,1.5,1\nbb,2,1\nab,3,1\nba,4,1\n");
  CHECK_THROWS_WITH_AS(io::read_branch_csv(dir.file("bad_count.csv")),
                       doctest::Contains("counts"), SchemaError);
}

TEST_CASE("beating CSV round-trips and rejects short files") {
  TempDir dir;
  const auto data = beating::synthesize_beating_dataset(
      {800.0, 0.9, 0.63, 13.8, 0.1}, beating::delay_grid(4.0, 0.25), 3);
  const auto path = dir.file("beating.csv");
  io::write_beating_csv(path, data);
  const auto parsed = io::read_beating_csv(path);
  CHECK(parsed.delays_ps == data.delays_ps);
  CHECK(parsed.counts == data.counts);
  CHECK(parsed.sigmas == data.sigmas);

  io::write_beating_csv(dir.file("again.csv"), parsed);
  CHECK(io::read_text_file(dir.file("again.csv")) == io::read_text_file(path));

  io::write_text_file(dir.file("short.csv"),
                      "delay_ps,counts,sigma\n0,10,3.1\n1,11,3.3\n2,12,3.4\n");
  CHECK_THROWS_AS(io::read_beating_csv(dir.file("short.csv")), SchemaError);

  io::write_text_file(dir.file("bad_row.csv"),
                      "delay_ps,counts,sigma\n0,10\n1,11,3.3\n2,12,3.4\n3,1,1\n4,1,1\n");
  CHECK_THROWS_WITH_AS(io::read_beating_csv(dir.file("bad_row.csv")),
                       doctest::Contains("line 2"), SchemaError);
}

TEST_CASE("power scan CSV round-trips") {
  TempDir dir;
  std::vector<estimation::PowerScanPoint> points{
      {0.5, 123.456789012345, 1.5}, {1.0, 500.25, 3.25}, {2.0, 2000.125, 7.0}};
  const auto path = dir.file("scan.csv");
  io::write_power_scan_csv(path, points);
  const auto parsed = io::read_power_scan_csv(path);
  REQUIRE(parsed.size() == points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(parsed[i].power_mw == points[i].power_mw);
    CHECK(parsed[i].singles_hz == points[i].singles_hz);
    CHECK(parsed[i].sigma_hz == points[i].sigma_hz);
  }
}

TEST_CASE("fit report JSON round-trips the data model") {
  TempDir dir;
  io::FitReport report;
  report.fit.params = {999.1, 0.961, 0.6301, 13.82, -0.003};
  report.fit.errors = {1.35, 0.0017, 0.0018, 0.0017, 0.0026};
  report.fit.reduced_chi_square = 0.92;
  report.fit.converged = true;
  report.fit.iterations = 16;
  report.data = beating::synthesize_beating_dataset(
      {1000.0, 0.96, 0.63, 13.8, 0.0}, beating::delay_grid(3.0, 0.1), 4);
  report.provenance = {"fnv1a:123", 9, kToolVersion};

  const auto path = dir.file("fit.json");
  io::write_fit_report(path, report);
  const auto parsed = io::read_fit_report(path);
  CHECK(parsed.fit.params.visibility == report.fit.params.visibility);
  CHECK(parsed.fit.errors.phase == report.fit.errors.phase);
  CHECK(parsed.fit.iterations == report.fit.iterations);
  CHECK(parsed.data.counts == report.data.counts);
  CHECK(parsed.data.delays_ps == report.data.delays_ps);
  CHECK(parsed.provenance.config_hash == "fnv1a:123");
}

TEST_CASE("report JSON round-trips with and without the power scan") {
  TempDir dir;
  for (const bool with_scan : {true, false}) {
    const auto bundle = sample_bundle(with_scan);
    const auto path = dir.file(with_scan ? "with.json" : "without.json");
    io::write_report(path, bundle);
    const auto parsed = io::read_report(path);
    CHECK(parsed.balance.mean == bundle.balance.mean);
    CHECK(parsed.ratio_db.db == bundle.ratio_db.db);
    CHECK(parsed.density.entries(1, 2).real() == bundle.density.entries(1, 2).real());
    CHECK(parsed.density.physical == bundle.density.physical);
    CHECK(parsed.fidelity.sigma == bundle.fidelity.sigma);
    CHECK(parsed.bootstrap.replicates == bundle.bootstrap.replicates);
    CHECK(parsed.beating_data.counts == bundle.beating_data.counts);
    CHECK(parsed.power_scan.has_value() == with_scan);
    if (with_scan) {
      CHECK(parsed.power_scan->points.size() == bundle.power_scan->points.size());
      CHECK(parsed.power_scan->fit.quadratic == bundle.power_scan->fit.quadratic);
    }
  }
}

TEST_CASE("density CSV carries the two real-valued blocks") {
  TempDir dir;
  const auto rho = estimation::reconstruct_density(0.56, 0.96, 0.4);
  const auto path = dir.file("rho.csv");
  io::write_density_csv(path, rho);
  const std::string text = io::read_text_file(path);
  CHECK(text.rfind("real\n", 0) == 0);
  CHECK(text.find("\nimag\n") != std::string::npos);
  // 2 labels + 8 rows of 4 numbers
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}

TEST_CASE("render_report writes plots, sidecars and summary") {
  TempDir dir;
  const auto full = plots::render_report(sample_bundle(true), dir.file("full"));
  CHECK(full.plots.size() == 4);
  CHECK(full.warnings.empty());
  CHECK(fs::exists(dir.path / "full" / "beating_fit.svg"));
  CHECK(fs::exists(dir.path / "full" / "summary.txt"));
  CHECK(fs::exists(dir.path / "full" / "density_matrix_plot.csv"));

  const auto partial = plots::render_report(sample_bundle(false), dir.file("partial"));
  CHECK(partial.plots.size() == 3);
  CHECK(partial.warnings.size() == 1);

  // sidecar data equals the report data verbatim
  const std::string sidecar =
      io::read_text_file((dir.path / "full" / "beating_fit_plot.csv").string());
  const auto bundle = sample_bundle(true);
  std::size_t row_start = sidecar.find('\n') + 1;
  for (std::size_t i = 0; i < bundle.beating_data.delays_ps.size(); ++i) {
    const std::size_t row_end = sidecar.find('\n', row_start);
    const std::string row = sidecar.substr(row_start, row_end - row_start);
    const std::string expected_prefix = io::format_double(bundle.beating_data.delays_ps[i]) +
                                        "," + std::to_string(bundle.beating_data.counts[i]) +
                                        "," + io::format_double(bundle.beating_data.sigmas[i]);
    CHECK(row.rfind(expected_prefix, 0) == 0);
    row_start = row_end + 1;
  }
}

TEST_CASE("hash_file fingerprints content") {
  TempDir dir;
  io::write_text_file(dir.file("a.txt"), "hello");
  io::write_text_file(dir.file("b.txt"), "hello");
  io::write_text_file(dir.file("c.txt"), "world");
  CHECK(io::hash_file(dir.file("a.txt")) == io::hash_file(dir.file("b.txt")));
  CHECK(io::hash_file(dir.file("a.txt")) != io::hash_file(dir.file("c.txt")));
}
