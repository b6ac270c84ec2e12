#pragma once

#include <cstdint>

#include "freqbin/statekit.hpp"

namespace freqbin::counting {

enum class Arm { Signal, Idler };

// Scalar rate model of the source. Pairs grow quadratically with pump power
// (cascaded process), noise photons linearly, dark counts are constant.
struct SourceModel {
  double pair_coefficient_hz_per_mw2{};
  double noise_coefficient_hz_per_mw{};
  double collection_efficiency_signal{1.0};
  double collection_efficiency_idler{1.0};
  double dark_rate_hz{};
};
void validate(const SourceModel& model);

struct CoincidenceConfig {
  double window_ps{};
  double integration_time_s{};
};
void validate(const CoincidenceConfig& config);

// Four coincidence counts with their Poissonian (sqrt-n) uncertainties.
struct BranchCounts {
  std::int64_t n_aa{};
  std::int64_t n_bb{};
  std::int64_t n_ab{};
  std::int64_t n_ba{};
  double sigma_aa{};
  double sigma_bb{};
  double sigma_ab{};
  double sigma_ba{};
  double integration_time_s{};
};

// One operating point of the coincidence measurement vs pump power.
struct CarPoint {
  double power_mw{};
  double singles_signal_hz{};
  double singles_idler_hz{};
  double coincidence_hz{};
  double accidental_hz{};
  double car{};
};

// Detection efficiency of each (photon, output port) path.
struct PortEfficiencies {
  double signal_a{1.0};
  double signal_b{1.0};
  double idler_a{1.0};
  double idler_b{1.0};
};
void validate(const PortEfficiencies& ports);

// Expected leak counts added to each branch regardless of the quantum state.
struct BranchFloors {
  double aa{};
  double bb{};
  double ab{};
  double ba{};
};
void validate(const BranchFloors& floors);

// Antibunching/bunching power ratio. `infinite` marks the zero-bunching
// sentinel case distinctly instead of reporting an unbounded number as data.
struct RatioDb {
  double db{};
  bool infinite{false};
};

struct BalanceEstimate {
  double p{};
  double sigma{};
};

// Generated pair rate before any collection losses.
double pair_generation_rate(const SourceModel& model, double power_mw);

// Single-side count rate of one arm:
// pair_coefficient * P^2 * eta_arm + noise_coefficient * P + dark_rate.
double singles_rate(const SourceModel& model, double power_mw, Arm arm);

// Accidental coincidence rate singles_s * singles_i * window (window in ps).
double accidental_rate(double singles_signal_hz, double singles_idler_hz,
                       double window_ps);

// Coincidence-to-accidental ratio, with the measured coincidence rate in the
// numerator (accidentals included). Throws UndefinedCarError at zero
// accidentals rather than returning infinity.
double car(double coincidence_hz, double accidental_hz);

// Full operating point at one pump power: singles on both arms, accidentals
// for the window, measured coincidence rate (true + accidental) and CAR.
// CAR is NaN when the accidental rate is exactly zero.
CarPoint characterize(const SourceModel& model, double power_mw,
                      double window_ps);

// Draws the four branch counts from independent Poisson distributions with
// means  probs * total_pairs * (port-efficiency product) + floor.
// Identical seeds give identical counts. Sigmas are sqrt(n).
BranchCounts simulate_branch_counts(const statekit::BranchProbabilities& probs,
                                    double total_pairs,
                                    const PortEfficiencies& ports,
                                    const BranchFloors& floors,
                                    std::uint64_t seed,
                                    double integration_time_s);

// 10 log10((n_ab + n_ba) / (n_aa + n_bb)). Zero bunching counts yield the
// infinite-ratio sentinel.
RatioDb antibunch_bunch_ratio_db(const BranchCounts& counts);

// Balance parameter p = n_ba / (n_ab + n_ba), the population share of the
// larger antibunching branch, with the binomial-proportion Poisson error.
BalanceEstimate balance_parameter(const BranchCounts& counts);

}  // namespace freqbin::counting
