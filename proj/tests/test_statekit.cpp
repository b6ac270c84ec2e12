#include <cmath>
#include <complex>

#include <doctest.h>

#include "freqbin/constants.hpp"
#include "freqbin/errors.hpp"
#include "freqbin/rng.hpp"
#include "freqbin/statekit.hpp"

using namespace freqbin;
using statekit::Basis;
using statekit::Complex;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("pump_phase recovers the relative phase") {
  CHECK(statekit::pump_phase({kInvSqrt2, kInvSqrt2}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(statekit::pump_phase({kInvSqrt2, Complex(0.0, kInvSqrt2)}) ==
        doctest::Approx(kPi / 2).epsilon(1e-14));

  // oracle: build the amplitude with std::polar and read the phase back
  const Complex v = std::polar(kInvSqrt2, 2.3);
  CHECK(statekit::pump_phase({kInvSqrt2, v}) == doctest::Approx(2.3).epsilon(1e-14));

  // wrapping: 5 rad lands at 5 - 2 pi
  const Complex far = std::polar(kInvSqrt2, 5.0);
  CHECK(statekit::pump_phase({kInvSqrt2, far}) ==
        doctest::Approx(5.0 - 2 * kPi).epsilon(1e-12));
}

TEST_CASE("pump_phase rejects non-normalized input") {
  CHECK_THROWS_AS(statekit::pump_phase({1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(statekit::pump_phase({0.0, 0.0}), ValidationError);
}

TEST_CASE("sagnac_state carries the phase on the second amplitude") {
  const auto zero = statekit::sagnac_state(0.0);
  CHECK(zero.basis == Basis::HV);
  CHECK(std::abs(zero.amp_first - Complex(kInvSqrt2, 0)) < 1e-15);
  CHECK(std::abs(zero.amp_second - Complex(kInvSqrt2, 0)) < 1e-15);

  const auto pi_state = statekit::sagnac_state(kPi);
  CHECK(std::abs(pi_state.amp_second - Complex(-kInvSqrt2, 0)) < 1e-15);

  const auto third = statekit::sagnac_state(kPi / 3);
  // frozen from the complex-exponential oracle e^{i pi/3} / sqrt 2
  CHECK(third.amp_first.real() == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(third.amp_second.real() == doctest::Approx(0.35355).epsilon(1e-5));
  CHECK(third.amp_second.imag() == doctest::Approx(0.61237).epsilon(1e-5));
  CHECK(std::abs(third.amp_second - std::polar(kInvSqrt2, kPi / 3)) < 1e-15);

  CHECK_THROWS_AS(statekit::sagnac_state(std::nan("")), ValidationError);
}

TEST_CASE("fpbs_decompose reproduces the (1 +- e^{i phi0})/2 coefficients") {
  const auto bunching = statekit::fpbs_decompose(statekit::sagnac_state(0.0));
  CHECK(bunching.basis == Basis::BunchAntibunch);
  CHECK(std::abs(bunching.amp_first - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(bunching.amp_second) < 1e-15);

  const auto antibunching = statekit::fpbs_decompose(statekit::sagnac_state(kPi));
  CHECK(std::abs(antibunching.amp_first) < 1e-15);
  CHECK(std::abs(antibunching.amp_second - Complex(1, 0)) < 1e-15);

  const auto mixed = statekit::fpbs_decompose(statekit::sagnac_state(kPi / 2));
  // |1 +- i| / 2 = sqrt(2)/2
  CHECK(std::abs(mixed.amp_first) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  CHECK(std::abs(mixed.amp_second) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
}

TEST_CASE("fpbs_decompose rejects wrong basis and unnormalized input") {
  statekit::TwoPhotonState wrong{kInvSqrt2, kInvSqrt2, Basis::BunchAntibunch};
  CHECK_THROWS_AS(statekit::fpbs_decompose(wrong), UsageError);
  statekit::TwoPhotonState unnormalized{1.0, 1.0, Basis::HV};
  CHECK_THROWS_AS(statekit::fpbs_decompose(unnormalized), ValidationError);
}

TEST_CASE("fpbs_decompose norm and closed-form branch weights over sampled phases") {
  rng::RandomStream stream(42);
  for (int i = 0; i < 1000; ++i) {
    const double phi0 = -2 * kPi + 4 * kPi * stream.uniform();
    const auto state = statekit::fpbs_decompose(statekit::sagnac_state(phi0));
    const double norm = std::norm(state.amp_first) + std::norm(state.amp_second);
    CHECK(std::abs(norm - 1.0) < 1e-12);
    const double c = std::cos(phi0 / 2);
    const double s = std::sin(phi0 / 2);
    CHECK(std::abs(std::norm(state.amp_first) - c * c) < 1e-12);
    CHECK(std::abs(std::norm(state.amp_second) - s * s) < 1e-12);
  }
}

TEST_CASE("branch_probabilities splits each component 50/50") {
  const auto anti = statekit::branch_probabilities(
      statekit::fpbs_decompose(statekit::sagnac_state(kPi)));
  CHECK(anti.p_aa == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(anti.p_bb == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(anti.p_ab == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(anti.p_ba == doctest::Approx(0.5).epsilon(1e-14));

  const auto bunch = statekit::branch_probabilities(
      statekit::fpbs_decompose(statekit::sagnac_state(0.0)));
  CHECK(bunch.p_aa == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bunch.p_ab == doctest::Approx(0.0).epsilon(1e-14));

  const auto quarter = statekit::branch_probabilities(
      statekit::fpbs_decompose(statekit::sagnac_state(kPi / 2)));
  // cos^2(pi/4)/2 = 1/4 in every branch
  CHECK(quarter.p_aa == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(quarter.p_bb == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(quarter.p_ab == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(quarter.p_ba == doctest::Approx(0.25).epsilon(1e-12));

  statekit::TwoPhotonState hv{kInvSqrt2, kInvSqrt2, Basis::HV};
  CHECK_THROWS_AS(statekit::branch_probabilities(hv), UsageError);
}

TEST_CASE("branch probabilities sum to one and ignore a global phase") {
  rng::RandomStream stream(7);
  for (int i = 0; i < 1000; ++i) {
    const double phi0 = -2 * kPi + 4 * kPi * stream.uniform();
    const double global = 2 * kPi * stream.uniform();
    auto state = statekit::fpbs_decompose(statekit::sagnac_state(phi0));
    const auto base = statekit::branch_probabilities(state);
    CHECK(std::abs(base.p_aa + base.p_bb + base.p_ab + base.p_ba - 1.0) < 1e-12);

    const Complex rot = std::polar(1.0, global);
    state.amp_first *= rot;
    state.amp_second *= rot;
    const auto rotated = statekit::branch_probabilities(state);
    CHECK(std::abs(rotated.p_aa - base.p_aa) < 1e-12);
    CHECK(std::abs(rotated.p_ab - base.p_ab) < 1e-12);
  }
}

TEST_CASE("solve_signal_wavelength inverts energy conservation") {
  CHECK(statekit::solve_signal_wavelength(1540.56, 1540.56) ==
        doctest::Approx(1540.56).epsilon(1e-12));

  const double signal = statekit::solve_signal_wavelength(1540.56, 1531.90);
  CHECK(signal == doctest::Approx(1549.32).epsilon(1e-5));
  // substitute-back oracle
  CHECK(std::abs(2.0 / 1540.56 - (1.0 / signal + 1.0 / 1531.90)) <
        1e-9 * (2.0 / 1540.56));

  // signal/idler exchange symmetry
  CHECK(statekit::solve_signal_wavelength(1540.56, signal) ==
        doctest::Approx(1531.90).epsilon(1e-9));

  CHECK_THROWS_AS(statekit::solve_signal_wavelength(1540.56, 200.0),
                  InfeasibleWavelengthError);
  CHECK_THROWS_AS(statekit::solve_signal_wavelength(-1.0, 1531.90), ValidationError);
}

TEST_CASE("frequency_difference matches the wavelength difference") {
  const auto degenerate = statekit::make_frequencies(1540.56, 1540.56);
  CHECK(statekit::frequency_difference(degenerate) == doctest::Approx(0.0).epsilon(1e-12));

  const auto freqs = statekit::make_frequencies(1540.56, 1531.90);
  const double delta_omega = statekit::frequency_difference(freqs);
  // frozen from 2 pi c (1/1531.90 - 1/lambda_s), c = 299792.458 nm/ps
  CHECK(delta_omega == doctest::Approx(13.824181446093412).epsilon(1e-12));
  CHECK(delta_omega == doctest::Approx(13.8).epsilon(0.01));

  // swapping signal and idler flips the sign
  const statekit::PhotonFrequencies swapped{freqs.lambda_pump_nm,
                                            freqs.lambda_idler_nm,
                                            freqs.lambda_signal_nm};
  CHECK(statekit::frequency_difference(swapped) ==
        doctest::Approx(-delta_omega).epsilon(1e-12));
}

TEST_CASE("frequencies reconstruct from delta omega and the pump") {
  rng::RandomStream stream(11);
  for (int i = 0; i < 200; ++i) {
    const double lambda_pump = 1500.0 + 100.0 * stream.uniform();
    const double lambda_idler = lambda_pump - 15.0 * stream.uniform();
    const auto freqs = statekit::make_frequencies(lambda_pump, lambda_idler);
    const double delta_omega = statekit::frequency_difference(freqs);

    // inverse oracle: split 2/lambda_p by the frequency difference
    const double half_sum = 1.0 / lambda_pump;
    const double half_diff = delta_omega / (4.0 * kPi * kSpeedOfLightNmPerPs);
    const double idler_back = 1.0 / (half_sum + half_diff);
    const double signal_back = 1.0 / (half_sum - half_diff);
    CHECK(std::abs(idler_back - freqs.lambda_idler_nm) < 1e-9 * lambda_idler);
    CHECK(std::abs(signal_back - freqs.lambda_signal_nm) < 1e-9 * freqs.lambda_signal_nm);
  }
}

TEST_CASE("photon frequency validation catches broken triples") {
  CHECK_THROWS_AS(statekit::validate({1540.56, 1549.32, 1531.90}), ValidationError);
  CHECK_NOTHROW(statekit::validate(statekit::make_frequencies(1540.56, 1531.90)));
}
