#pragma once

#include <cstdint>
#include <vector>

namespace freqbin::beating {

// Parameters of the coincidence-vs-delay interferogram
//   P(dt) = A [1 - V sinc(Omega dt) cos(delta_omega dt + phase)].
// Delays in ps, angular frequencies in rad/ps.
struct BeatingParams {
  double amplitude{};        // A, expected counts per bin away from the dip
  double visibility{};       // V in [0, 1]
  double envelope{};         // Omega, envelope angular bandwidth (rad/ps)
  double delta_omega{};      // signal/idler angular frequency difference (rad/ps)
  double phase{};            // beating phase (rad)
};
void validate(const BeatingParams& params);

struct BeatingDataset {
  std::vector<double> delays_ps;
  std::vector<std::int64_t> counts;
  std::vector<double> sigmas;
  double integration_time_per_point_s{1.0};
};
void validate(const BeatingDataset& data);

// sin(x)/x with sinc(0) = 1 (no pi normalization).
double sinc(double x);

// Expected coincidence counts at one relative delay.
double beating_curve(const BeatingParams& params, double delay_ps);

// Symmetric delay grid centered on zero; includes 0 when span/step is even.
std::vector<double> delay_grid(double span_ps, double step_ps);

// Poisson-sampled interferogram over the given delays; sigmas are sqrt(n),
// identical seeds give identical datasets.
BeatingDataset synthesize_beating_dataset(const BeatingParams& params,
                                          const std::vector<double>& delays_ps,
                                          std::uint64_t seed,
                                          double integration_time_per_point_s = 1.0);

}  // namespace freqbin::beating
