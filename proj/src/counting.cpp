#include "freqbin/counting.hpp"

#include <cmath>
#include <limits>

#include "freqbin/errors.hpp"
#include "freqbin/rng.hpp"

namespace freqbin::counting {

namespace {

void require_efficiency(double value, const char* what) {
  if (!(value > 0.0) || value > 1.0) {
    throw ValidationError(std::string(what) + " must lie in (0, 1]");
  }
}

void require_nonnegative(double value, const char* what) {
  if (!(value >= 0.0)) {
    throw ValidationError(std::string(what) + " must be nonnegative");
  }
}

void validate_probabilities(const statekit::BranchProbabilities& probs) {
  const double sum = probs.p_aa + probs.p_bb + probs.p_ab + probs.p_ba;
  if (!(probs.p_aa >= 0.0) || !(probs.p_bb >= 0.0) || !(probs.p_ab >= 0.0) ||
      !(probs.p_ba >= 0.0) || std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("branch probabilities must be nonnegative and sum to 1");
  }
}

}  // namespace

void validate(const SourceModel& model) {
  require_nonnegative(model.pair_coefficient_hz_per_mw2, "pair coefficient");
  require_nonnegative(model.noise_coefficient_hz_per_mw, "noise coefficient");
  require_nonnegative(model.dark_rate_hz, "dark rate");
  require_efficiency(model.collection_efficiency_signal, "signal collection efficiency");
  require_efficiency(model.collection_efficiency_idler, "idler collection efficiency");
}

void validate(const CoincidenceConfig& config) {
  if (!(config.window_ps > 0.0)) {
    throw ValidationError("coincidence window must be positive");
  }
  if (!(config.integration_time_s > 0.0)) {
    throw ValidationError("integration time must be positive");
  }
}

void validate(const PortEfficiencies& ports) {
  require_efficiency(ports.signal_a, "signal-a port efficiency");
  require_efficiency(ports.signal_b, "signal-b port efficiency");
  require_efficiency(ports.idler_a, "idler-a port efficiency");
  require_efficiency(ports.idler_b, "idler-b port efficiency");
}

void validate(const BranchFloors& floors) {
  require_nonnegative(floors.aa, "aa floor");
  require_nonnegative(floors.bb, "bb floor");
  require_nonnegative(floors.ab, "ab floor");
  require_nonnegative(floors.ba, "ba floor");
}

double pair_generation_rate(const SourceModel& model, double power_mw) {
  validate(model);
  require_nonnegative(power_mw, "pump power");
  return model.pair_coefficient_hz_per_mw2 * power_mw * power_mw;
}

double singles_rate(const SourceModel& model, double power_mw, Arm arm) {
  validate(model);
  require_nonnegative(power_mw, "pump power");
  const double eta = arm == Arm::Signal ? model.collection_efficiency_signal
                                        : model.collection_efficiency_idler;
  return model.pair_coefficient_hz_per_mw2 * power_mw * power_mw * eta +
         model.noise_coefficient_hz_per_mw * power_mw + model.dark_rate_hz;
}

double accidental_rate(double singles_signal_hz, double singles_idler_hz,
                       double window_ps) {
  require_nonnegative(singles_signal_hz, "signal singles rate");
  require_nonnegative(singles_idler_hz, "idler singles rate");
  require_nonnegative(window_ps, "coincidence window");
  return singles_signal_hz * singles_idler_hz * (window_ps * 1e-12);
}

double car(double coincidence_hz, double accidental_hz) {
  require_nonnegative(coincidence_hz, "coincidence rate");
  if (accidental_hz < 0.0) {
    throw ValidationError("accidental rate must be nonnegative");
  }
  if (accidental_hz == 0.0) {
    throw UndefinedCarError("CAR is undefined at zero accidental rate");
  }
  return coincidence_hz / accidental_hz;
}

CarPoint characterize(const SourceModel& model, double power_mw, double window_ps) {
  const double singles_s = singles_rate(model, power_mw, Arm::Signal);
  const double singles_i = singles_rate(model, power_mw, Arm::Idler);
  const double accidental = accidental_rate(singles_s, singles_i, window_ps);
  const double true_coincidence = pair_generation_rate(model, power_mw) *
                                  model.collection_efficiency_signal *
                                  model.collection_efficiency_idler;
  // Measured coincidence includes accidentals; CAR ties the two together.
  const double coincidence = true_coincidence + accidental;
  const double ratio = accidental > 0.0
                           ? coincidence / accidental
                           : std::numeric_limits<double>::quiet_NaN();
  return {power_mw, singles_s, singles_i, coincidence, accidental, ratio};
}

BranchCounts simulate_branch_counts(const statekit::BranchProbabilities& probs,
                                    double total_pairs,
                                    const PortEfficiencies& ports,
                                    const BranchFloors& floors,
                                    std::uint64_t seed,
                                    double integration_time_s) {
  validate_probabilities(probs);
  validate(ports);
  validate(floors);
  require_nonnegative(total_pairs, "total pair number");

  const double mean_aa = probs.p_aa * total_pairs * ports.signal_a * ports.idler_a + floors.aa;
  const double mean_bb = probs.p_bb * total_pairs * ports.signal_b * ports.idler_b + floors.bb;
  const double mean_ab = probs.p_ab * total_pairs * ports.signal_a * ports.idler_b + floors.ab;
  const double mean_ba = probs.p_ba * total_pairs * ports.signal_b * ports.idler_a + floors.ba;

  rng::RandomStream stream(seed);
  BranchCounts counts;
  counts.n_aa = stream.poisson(mean_aa);
  counts.n_bb = stream.poisson(mean_bb);
  counts.n_ab = stream.poisson(mean_ab);
  counts.n_ba = stream.poisson(mean_ba);
  counts.sigma_aa = std::sqrt(static_cast<double>(counts.n_aa));
  counts.sigma_bb = std::sqrt(static_cast<double>(counts.n_bb));
  counts.sigma_ab = std::sqrt(static_cast<double>(counts.n_ab));
  counts.sigma_ba = std::sqrt(static_cast<double>(counts.n_ba));
  counts.integration_time_s = integration_time_s;
  return counts;
}

RatioDb antibunch_bunch_ratio_db(const BranchCounts& counts) {
  if (counts.n_aa < 0 || counts.n_bb < 0 || counts.n_ab < 0 || counts.n_ba < 0) {
    throw ValidationError("branch counts must be nonnegative");
  }
  const double bunching = static_cast<double>(counts.n_aa + counts.n_bb);
  const double antibunching = static_cast<double>(counts.n_ab + counts.n_ba);
  if (bunching == 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  if (antibunching == 0.0) {
    return {-std::numeric_limits<double>::infinity(), true};
  }
  return {10.0 * std::log10(antibunching / bunching), false};
}

BalanceEstimate balance_parameter(const BranchCounts& counts) {
  if (counts.n_ab < 0 || counts.n_ba < 0) {
    throw ValidationError("branch counts must be nonnegative");
  }
  const double total = static_cast<double>(counts.n_ab + counts.n_ba);
  if (!(total > 0.0)) {
    throw ValidationError("balance parameter needs at least one antibunching count");
  }
  const double p = static_cast<double>(counts.n_ba) / total;
  // Binomial-proportion form of the Poisson error on the branch split.
  const double sigma = std::sqrt(p * (1.0 - p) / total);
  return {p, sigma};
}

}  // namespace freqbin::counting
