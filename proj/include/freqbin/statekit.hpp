#pragma once

#include <complex>

namespace freqbin::statekit {

using Complex = std::complex<double>;

enum class Basis {
  HV,              // pump-direction basis at the Sagnac output
  BunchAntibunch,  // bunching / antibunching superposition after the fiber PBS
  PathBranches,    // per-branch outcome space (aa, bb, ab, ba)
};

// Pump polarization as a normalized Jones vector. The relative phase
// arg(amplitude_v) - arg(amplitude_h) is the control knob of the source.
struct PumpPolarization {
  Complex amplitude_h{};
  Complex amplitude_v{};
};

// Two-photon state as a normalized complex amplitude pair over a two-element
// basis. Which pair of kets the amplitudes multiply is tracked by `basis`.
struct TwoPhotonState {
  Complex amp_first{};
  Complex amp_second{};
  Basis basis{Basis::HV};
};

// Probabilities of the four coincidence branches behind the fiber PBS:
// both photons in port a, both in b, and the two split configurations.
struct BranchProbabilities {
  double p_aa{};
  double p_bb{};
  double p_ab{};
  double p_ba{};
};

struct PhotonFrequencies {
  double lambda_pump_nm{};
  double lambda_signal_nm{};
  double lambda_idler_nm{};
};

// Wrap an angle to [-pi, pi].
double wrap_angle(double angle_rad);

// Relative pump phase phi_p = arg(amplitude_v) - arg(amplitude_h), wrapped.
// Throws ValidationError unless |h|^2 + |v|^2 = 1 within 1e-12.
double pump_phase(const PumpPolarization& pol);

// State at the Sagnac output for loop phase phi0 = 2 phi_p:
// (1/sqrt2, e^{i phi0}/sqrt2) in the HV basis. The phase rides on the
// V (clockwise) amplitude; the H amplitude stays real positive.
TwoPhotonState sagnac_state(double phi0_rad);

// Fiber-PBS decomposition of an HV state into the bunching/antibunching
// superposition: amplitudes ((h + v)/sqrt2, (h - v)/sqrt2). For the Sagnac
// state this gives the ((1 + e^{i phi0})/2, (1 - e^{i phi0})/2) pair.
// Throws UsageError when the input is not in the HV basis.
TwoPhotonState fpbs_decompose(const TwoPhotonState& state);

// Outcome probabilities of the four branches. Each of the bunching and
// antibunching components splits 50/50 into its two branch outcomes, so the
// ideal model is exactly symmetric (p_aa = p_bb, p_ab = p_ba).
BranchProbabilities branch_probabilities(const TwoPhotonState& state);

// Signal wavelength from energy conservation of the cascaded process:
// two pump photons make one photon at twice the energy which splits into
// signal + idler, i.e. 2/lambda_p = 1/lambda_s + 1/lambda_i.
// Throws InfeasibleWavelengthError when the result would be nonpositive.
double solve_signal_wavelength(double lambda_pump_nm, double lambda_idler_nm);

// Builds the frequency triple with the signal wavelength derived from
// energy conservation.
PhotonFrequencies make_frequencies(double lambda_pump_nm, double lambda_idler_nm);

// Throws ValidationError unless wavelengths are positive and energy
// conservation holds to relative 1e-9.
void validate(const PhotonFrequencies& freqs);

// Signal/idler angular frequency difference in rad/ps,
// 2 pi c (1/lambda_i - 1/lambda_s); positive when the idler is bluer.
double frequency_difference(const PhotonFrequencies& freqs);

}  // namespace freqbin::statekit
