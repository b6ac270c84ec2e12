#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "freqbin/beating.hpp"
#include "freqbin/counting.hpp"

namespace freqbin::estimation {

// Per-parameter standard errors of a beating fit, same layout as BeatingParams.
struct ParameterErrors {
  double amplitude{};
  double visibility{};
  double envelope{};
  double delta_omega{};
  double phase{};
};

struct BeatingFit {
  beating::BeatingParams params;
  ParameterErrors errors;
  double reduced_chi_square{};
  bool converged{false};
  int iterations{};
};

struct FitOptions {
  int max_iterations{1000};
  // Expected accidental counts per point, subtracted from the data before
  // fitting. Off (0) by default: visibilities are reported without
  // accidental subtraction unless explicitly requested.
  double subtract_accidental_counts{0.0};
};

// Starting point for the beating fit: amplitude from the mean counts,
// delta_omega from the dominant DFT frequency of the mean-subtracted series
// (resampled onto a uniform grid), visibility from the modulation depth,
// broad envelope 2 pi / span, zero phase. Requires >= 16 points.
beating::BeatingParams initial_guess(const beating::BeatingDataset& data);

// Weighted (1/sigma^2) damped least-squares fit of the beating curve.
// Multi-starts over phase in {0, pi/2, pi, 3pi/2} x sign(delta_omega);
// best objective wins, ties go to the smaller |phase|. Converged when the
// relative objective decrease is < 1e-10 or the step norm < 1e-12.
// Uncertainties come from the inverse normal-equations matrix at the optimum
// scaled by the reduced chi-square; singular normal equations throw
// DegenerateFitError. Non-convergence is reported via the flag, with the
// best parameters so far.
BeatingFit fit_beating(const beating::BeatingDataset& data,
                       const beating::BeatingParams& guess,
                       const FitOptions& options = {});

struct PowerScanPoint {
  double power_mw{};
  double singles_hz{};
  double sigma_hz{};
};

// Quadratic power-scan fit with nonnegative coefficients: the quadratic term
// is the pair contribution, the linear term the noise photons, the constant
// the dark rate.
struct PolynomialFit {
  double quadratic{};
  double linear{};
  double constant{};
  double sigma_quadratic{};
  double sigma_linear{};
  double sigma_constant{};

  double quadratic_component(double power_mw) const {
    return quadratic * power_mw * power_mw;
  }
  double linear_component(double power_mw) const { return linear * power_mw; }
  // Fit value as the exact sum of components, so the decomposition is
  // additive bit-for-bit.
  double value(double power_mw) const {
    return quadratic_component(power_mw) + linear_component(power_mw) + constant;
  }
};

PolynomialFit fit_power_scan(const std::vector<PowerScanPoint>& points);

// 4x4 density matrix over the two-photon frequency basis
// {|ss>, |si>, |is>, |ii>}: only the central 2x2 block is populated, with
// diagonal (p, 1-p) and coherences (V/2) e^{-+ i phase}.
struct DensityMatrix {
  Eigen::Matrix4cd entries;
  double p{};
  double visibility{};
  double phase{};
  bool physical{false};
};

// Eq.-style parameterized matrix without the strict visibility range check;
// used to report raw (possibly unphysical) fit outcomes. Requires p in [0, 1]
// and visibility >= 0.
DensityMatrix density_from_parameters(double p, double visibility, double phase);

// Strictly validated reconstruction: p in [0, 1], visibility in [0, 1],
// no silent clipping. The physicality flag is set by the margin test.
DensityMatrix reconstruct_density(double p, double visibility, double phase);

// sqrt(p(1-p)) - V/2; the state is physical (positive semidefinite) exactly
// when this is nonnegative.
double physicality_margin(double p, double visibility);

// Largest physical visibility at the given balance, min(1, 2 sqrt(p(1-p))).
// Explicit repair used only behind an opt-in flag; reconstruction itself
// never clips.
double clip_visibility_physical(double p, double visibility);

// Overlap with the maximally entangled |psi+> = (|si> + |is>)/sqrt2 by direct
// matrix contraction.
double fidelity_to_bell(const DensityMatrix& rho);

// Closed form of the same overlap for the parameterized matrix:
// (1 + V cos(phase)) / 2.
double fidelity_closed_form(double visibility, double phase);

struct Stat {
  double mean{};
  double sigma{};
};

struct BootstrapSummary {
  Stat balance;
  Stat visibility;
  Stat phase;
  Stat fidelity;
  int replicates{};
  std::uint64_t seed{};
};

// Parametric bootstrap of the downstream quantities: branch counts are
// resampled Poisson-wise (only where their recorded sigma is nonzero, so
// zero-variance inputs give zero-width distributions), fit parameters
// Gaussian-wise; p, V, phase and fidelity are recomputed per replicate.
// Each replicate draws from its own (seed, index)-derived stream, so the
// result is independent of evaluation order. Requires replicates >= 100.
BootstrapSummary propagate_uncertainties(const counting::BranchCounts& counts,
                                         const BeatingFit& fit, int replicates,
                                         std::uint64_t seed);

}  // namespace freqbin::estimation
