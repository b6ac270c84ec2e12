#include <cmath>
#include <vector>

#include <doctest.h>

#include "freqbin/constants.hpp"
#include "freqbin/counting.hpp"
#include "freqbin/errors.hpp"
#include "freqbin/estimation.hpp"
#include "freqbin/rng.hpp"
#include "freqbin/statekit.hpp"

using namespace freqbin;
using counting::Arm;

namespace {

counting::SourceModel test_model() {
  return {1800.0, 25000.0, 0.6, 0.55, 120.0};
}

statekit::BranchProbabilities probs_for(double phi0) {
  return statekit::branch_probabilities(
      statekit::fpbs_decompose(statekit::sagnac_state(phi0)));
}

}  // namespace

TEST_CASE("singles_rate follows the quadratic + linear + dark model") {
  const auto model = test_model();
  CHECK(counting::singles_rate(model, 0.0, Arm::Idler) == doctest::Approx(120.0));

  counting::SourceModel pairs_only = model;
  pairs_only.noise_coefficient_hz_per_mw = 0.0;
  pairs_only.dark_rate_hz = 0.0;
  const double at_one = counting::singles_rate(pairs_only, 1.0, Arm::Signal);
  const double at_two = counting::singles_rate(pairs_only, 2.0, Arm::Signal);
  CHECK(at_two == doctest::Approx(4.0 * at_one).epsilon(1e-12));

  // arm selection picks the matching collection efficiency
  CHECK(counting::singles_rate(pairs_only, 1.0, Arm::Signal) ==
        doctest::Approx(1800.0 * 0.6).epsilon(1e-12));
  CHECK(counting::singles_rate(pairs_only, 1.0, Arm::Idler) ==
        doctest::Approx(1800.0 * 0.55).epsilon(1e-12));

  CHECK_THROWS_AS(counting::singles_rate(model, -1.0, Arm::Idler), ValidationError);
}

TEST_CASE("synthetic power scan refits to the generating coefficients") {
  const auto model = test_model();
  const double integration = 10.0;
  rng::RandomStream stream(314159);
  std::vector<estimation::PowerScanPoint> points;
  for (int i = 1; i <= 10; ++i) {
    const double power = 0.9 * i;
    const double rate = counting::singles_rate(model, power, Arm::Idler);
    const auto n = stream.poisson(rate * integration);
    points.push_back({power, static_cast<double>(n) / integration,
                      std::sqrt(static_cast<double>(n)) / integration});
  }
  const auto fit = estimation::fit_power_scan(points);
  const double true_quadratic = 1800.0 * 0.55;
  CHECK(std::abs(fit.quadratic - true_quadratic) <= 3.0 * fit.sigma_quadratic);
  CHECK(std::abs(fit.linear - 25000.0) <= 3.0 * fit.sigma_linear);
  CHECK(std::abs(fit.constant - 120.0) <= 3.0 * fit.sigma_constant);
}

TEST_CASE("accidental_rate is the singles product over the window") {
  CHECK(counting::accidental_rate(0.0, 5e4, 300.0) == doctest::Approx(0.0));
  CHECK(counting::accidental_rate(1e5, 1e5, 300.0) ==
        doctest::Approx(3.0).epsilon(1e-12));

  // bilinear in the singles, linear in the window
  rng::RandomStream stream(5);
  for (int i = 0; i < 100; ++i) {
    const double s = 1e4 + 1e5 * stream.uniform();
    const double t = 1e4 + 1e5 * stream.uniform();
    const double w = 50.0 + 500.0 * stream.uniform();
    const double k = 0.5 + 3.0 * stream.uniform();
    const double base = counting::accidental_rate(s, t, w);
    CHECK(counting::accidental_rate(k * s, t, w) == doctest::Approx(k * base).epsilon(1e-12));
    CHECK(counting::accidental_rate(s, k * t, w) == doctest::Approx(k * base).epsilon(1e-12));
    CHECK(counting::accidental_rate(s, t, k * w) == doctest::Approx(k * base).epsilon(1e-12));
  }
}

TEST_CASE("car reproduces the reference operating point") {
  // 75.36 kHz coincidences over 51.02 Hz of accidentals
  CHECK(counting::car(75360.0, 51.02) == doctest::Approx(1477.0678165425322).epsilon(1e-12));
  CHECK(std::abs(counting::car(75360.0, 51.02) - 1477.0) <= 1.0);
  CHECK(counting::car(42.0, 42.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(counting::car(100.0, 0.0), UndefinedCarError);
  CHECK_THROWS_AS(counting::car(-1.0, 1.0), ValidationError);
}

TEST_CASE("characterize ties coincidence, accidentals and CAR together") {
  const auto model = test_model();
  const auto point = counting::characterize(model, 8.0, 300.0);
  CHECK(point.accidental_hz ==
        doctest::Approx(counting::accidental_rate(point.singles_signal_hz,
                                                  point.singles_idler_hz, 300.0)));
  CHECK(point.car == doctest::Approx(point.coincidence_hz / point.accidental_hz));

  // CAR strictly decreases as the noise contribution grows at fixed pair rate
  double previous = std::numeric_limits<double>::infinity();
  for (double noise = 0.0; noise <= 50000.0; noise += 10000.0) {
    counting::SourceModel noisy = model;
    noisy.noise_coefficient_hz_per_mw = noise;
    const double ratio = counting::characterize(noisy, 8.0, 300.0).car;
    CHECK(ratio < previous);
    previous = ratio;
  }
}

TEST_CASE("simulate_branch_counts honors zero-probability branches") {
  const auto probs = probs_for(kPi);  // pure antibunching
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto counts =
        counting::simulate_branch_counts(probs, 1000.0, {}, {}, seed, 10.0);
    CHECK(counts.n_aa == 0);
    CHECK(counts.n_bb == 0);
    CHECK(counts.n_ab + counts.n_ba > 0);
  }
}

TEST_CASE("simulate_branch_counts is deterministic per seed") {
  const auto probs = probs_for(2.0);
  const counting::PortEfficiencies ports{0.3, 0.4, 0.5, 0.6};
  const counting::BranchFloors floors{10.0, 12.0, 3.0, 4.0};
  const auto first = counting::simulate_branch_counts(probs, 5e4, ports, floors, 99, 10.0);
  const auto second = counting::simulate_branch_counts(probs, 5e4, ports, floors, 99, 10.0);
  CHECK(first.n_aa == second.n_aa);
  CHECK(first.n_bb == second.n_bb);
  CHECK(first.n_ab == second.n_ab);
  CHECK(first.n_ba == second.n_ba);
  CHECK(first.sigma_aa == doctest::Approx(std::sqrt(double(first.n_aa))));
  CHECK(first.integration_time_s == doctest::Approx(10.0));

  const auto other = counting::simulate_branch_counts(probs, 5e4, ports, floors, 100, 10.0);
  CHECK((other.n_ab != first.n_ab || other.n_ba != first.n_ba));
}

TEST_CASE("reference-tuned means put the dB ratio statistic near 22.13") {
  // pure antibunching with port efficiencies and floors giving means
  // (155, 157, 22427, 28560)
  const auto probs = probs_for(kPi);
  const counting::PortEfficiencies ports{0.16, 0.16, 0.1904, 0.14951333333333333};
  const counting::BranchFloors floors{155.0, 157.0, 0.0, 0.0};
  double sum_db = 0.0;
  const int replicates = 300;
  for (int r = 0; r < replicates; ++r) {
    const auto counts = counting::simulate_branch_counts(
        probs, 1.875e6, ports, floors, rng::derive_seed(17, r), 10.0);
    const auto ratio = counting::antibunch_bunch_ratio_db(counts);
    REQUIRE_FALSE(ratio.infinite);
    sum_db += ratio.db;
  }
  // sigma of a single replicate is ~0.25 dB, so the replicate mean sits
  // within ~0.05 dB of the expected ratio
  CHECK(sum_db / replicates == doctest::Approx(22.13).epsilon(0.005));
}

TEST_CASE("poisson branch counts have unit variance-to-mean ratio") {
  const auto probs = probs_for(kPi / 2);
  double sum = 0.0, sum_sq = 0.0;
  const int replicates = 2000;
  for (int r = 0; r < replicates; ++r) {
    const auto counts = counting::simulate_branch_counts(
        probs, 1600.0, {}, {}, rng::derive_seed(23, r), 1.0);
    const double value = static_cast<double>(counts.n_ab);
    sum += value;
    sum_sq += value * value;
  }
  const double mean = sum / replicates;
  const double variance = (sum_sq - replicates * mean * mean) / (replicates - 1);
  CHECK(std::abs(mean - 400.0) < 3.0 * std::sqrt(400.0 / replicates));
  CHECK(variance / mean > 0.9);
  CHECK(variance / mean < 1.1);
}

TEST_CASE("antibunch_bunch_ratio_db values and invariances") {
  const counting::BranchCounts paper{155, 157, 22427, 28560, 0, 0, 0, 0, 10.0};
  const auto ratio = counting::antibunch_bunch_ratio_db(paper);
  CHECK_FALSE(ratio.infinite);
  CHECK(std::abs(ratio.db - 22.13) <= 0.01);

  const counting::BranchCounts equal{100, 100, 150, 50, 0, 0, 0, 0, 1.0};
  CHECK(counting::antibunch_bunch_ratio_db(equal).db == doctest::Approx(0.0));

  const counting::BranchCounts tens{1, 1, 100, 100, 0, 0, 0, 0, 1.0};
  CHECK(counting::antibunch_bunch_ratio_db(tens).db == doctest::Approx(20.0).epsilon(1e-12));

  // invariant under uniform scaling of all four counts
  const counting::BranchCounts scaled{155 * 7, 157 * 7, 22427 * 7, 28560 * 7, 0, 0, 0, 0, 1.0};
  CHECK(counting::antibunch_bunch_ratio_db(scaled).db ==
        doctest::Approx(ratio.db).epsilon(1e-12));

  const counting::BranchCounts no_bunching{0, 0, 10, 20, 0, 0, 0, 0, 1.0};
  const auto sentinel = counting::antibunch_bunch_ratio_db(no_bunching);
  CHECK(sentinel.infinite);
  CHECK(std::isinf(sentinel.db));
}

TEST_CASE("balance_parameter matches the larger-branch share") {
  const counting::BranchCounts paper{155, 157, 22427, 28560, 0, 0, 0, 0, 10.0};
  const auto balance = counting::balance_parameter(paper);
  CHECK(std::abs(balance.p - 0.560) <= 0.001);
  CHECK(balance.sigma > 0.001);
  CHECK(balance.sigma < 0.01);

  const counting::BranchCounts symmetric{0, 0, 500, 500, 0, 0, 0, 0, 1.0};
  CHECK(counting::balance_parameter(symmetric).p == doctest::Approx(0.5));

  const counting::BranchCounts skewed{0, 0, 100, 300, 0, 0, 0, 0, 1.0};
  CHECK(counting::balance_parameter(skewed).p == doctest::Approx(0.75).epsilon(1e-12));

  // invariant under uniform scaling of the antibunching pair, and bounded
  const counting::BranchCounts scaled{0, 0, 900, 2700, 0, 0, 0, 0, 1.0};
  CHECK(counting::balance_parameter(scaled).p == doctest::Approx(0.75).epsilon(1e-12));
  rng::RandomStream stream(3);
  for (int i = 0; i < 100; ++i) {
    const auto ab = static_cast<std::int64_t>(1 + 1e4 * stream.uniform());
    const auto ba = static_cast<std::int64_t>(1e4 * stream.uniform());
    const auto estimate =
        counting::balance_parameter({0, 0, ab, ba, 0, 0, 0, 0, 1.0});
    CHECK(estimate.p >= 0.0);
    CHECK(estimate.p <= 1.0);
  }

  const counting::BranchCounts empty{10, 10, 0, 0, 0, 0, 0, 0, 1.0};
  CHECK_THROWS_AS(counting::balance_parameter(empty), ValidationError);
}

TEST_CASE("model validation rejects out-of-range parameters") {
  counting::SourceModel bad = test_model();
  bad.collection_efficiency_signal = 1.5;
  CHECK_THROWS_AS(counting::validate(bad), ValidationError);
  bad = test_model();
  bad.pair_coefficient_hz_per_mw2 = -1.0;
  CHECK_THROWS_AS(counting::validate(bad), ValidationError);
  CHECK_THROWS_AS(counting::validate(counting::CoincidenceConfig{0.0, 10.0}),
                  ValidationError);
  CHECK_THROWS_AS(counting::validate(counting::PortEfficiencies{0.5, 0.5, 0.0, 0.5}),
                  ValidationError);
}
