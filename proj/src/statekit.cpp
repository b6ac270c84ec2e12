#include "freqbin/statekit.hpp"

#include <cmath>

#include "freqbin/constants.hpp"
#include "freqbin/errors.hpp"

namespace freqbin::statekit {

namespace {

constexpr double kNormTolerance = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

bool normalized(double norm_sq) { return std::abs(norm_sq - 1.0) <= kNormTolerance; }

}  // namespace

double wrap_angle(double angle_rad) {
  // remainder() lands in [-pi, pi] for a 2*pi divisor.
  return std::remainder(angle_rad, 2.0 * kPi);
}

double pump_phase(const PumpPolarization& pol) {
  const double norm_sq = std::norm(pol.amplitude_h) + std::norm(pol.amplitude_v);
  if (!std::isfinite(norm_sq) || !normalized(norm_sq)) {
    throw ValidationError("pump polarization must be normalized to 1 within 1e-12");
  }
  return wrap_angle(std::arg(pol.amplitude_v) - std::arg(pol.amplitude_h));
}

TwoPhotonState sagnac_state(double phi0_rad) {
  if (!std::isfinite(phi0_rad)) {
    throw ValidationError("loop phase must be finite");
  }
  return {Complex{kInvSqrt2, 0.0},
          std::polar(kInvSqrt2, phi0_rad),
          Basis::HV};
}

TwoPhotonState fpbs_decompose(const TwoPhotonState& state) {
  if (state.basis != Basis::HV) {
    throw UsageError("fpbs_decompose expects a state in the HV basis");
  }
  const double norm_sq = std::norm(state.amp_first) + std::norm(state.amp_second);
  if (!std::isfinite(norm_sq) || !normalized(norm_sq)) {
    throw ValidationError("input state must be normalized to 1 within 1e-12");
  }
  return {(state.amp_first + state.amp_second) * kInvSqrt2,
          (state.amp_first - state.amp_second) * kInvSqrt2,
          Basis::BunchAntibunch};
}

BranchProbabilities branch_probabilities(const TwoPhotonState& state) {
  if (state.basis != Basis::BunchAntibunch) {
    throw UsageError("branch_probabilities expects the bunch/antibunch basis");
  }
  const double p_bunch = std::norm(state.amp_first);
  const double p_antibunch = std::norm(state.amp_second);
  if (!normalized(p_bunch + p_antibunch)) {
    throw ValidationError("input state must be normalized to 1 within 1e-12");
  }
  // Each component splits 50/50 into its two branch outcomes.
  return {p_bunch / 2.0, p_bunch / 2.0, p_antibunch / 2.0, p_antibunch / 2.0};
}

double solve_signal_wavelength(double lambda_pump_nm, double lambda_idler_nm) {
  if (!(lambda_pump_nm > 0.0) || !(lambda_idler_nm > 0.0)) {
    throw ValidationError("wavelengths must be positive");
  }
  const double inverse = 2.0 / lambda_pump_nm - 1.0 / lambda_idler_nm;
  if (!(inverse > 0.0)) {
    throw InfeasibleWavelengthError(
        "no positive signal wavelength satisfies 2/lambda_p = 1/lambda_s + 1/lambda_i");
  }
  return 1.0 / inverse;
}

PhotonFrequencies make_frequencies(double lambda_pump_nm, double lambda_idler_nm) {
  return {lambda_pump_nm,
          solve_signal_wavelength(lambda_pump_nm, lambda_idler_nm),
          lambda_idler_nm};
}

void validate(const PhotonFrequencies& freqs) {
  if (!(freqs.lambda_pump_nm > 0.0) || !(freqs.lambda_signal_nm > 0.0) ||
      !(freqs.lambda_idler_nm > 0.0)) {
    throw ValidationError("wavelengths must be positive");
  }
  const double pump_energy = 2.0 / freqs.lambda_pump_nm;
  const double pair_energy = 1.0 / freqs.lambda_signal_nm + 1.0 / freqs.lambda_idler_nm;
  if (std::abs(pump_energy - pair_energy) > 1e-9 * pump_energy) {
    throw ValidationError("energy conservation 2/lambda_p = 1/lambda_s + 1/lambda_i violated");
  }
}

double frequency_difference(const PhotonFrequencies& freqs) {
  validate(freqs);
  return 2.0 * kPi * kSpeedOfLightNmPerPs *
         (1.0 / freqs.lambda_idler_nm - 1.0 / freqs.lambda_signal_nm);
}

}  // namespace freqbin::statekit
