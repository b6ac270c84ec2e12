#include "freqbin/beating.hpp"

#include <cmath>

#include "freqbin/errors.hpp"
#include "freqbin/rng.hpp"

namespace freqbin::beating {

void validate(const BeatingParams& params) {
  if (!std::isfinite(params.amplitude) || !(params.amplitude > 0.0)) {
    throw ValidationError("amplitude must be positive");
  }
  if (!std::isfinite(params.visibility) || params.visibility < 0.0 ||
      params.visibility > 1.0) {
    throw ValidationError("visibility must lie in [0, 1]");
  }
  if (!std::isfinite(params.envelope) || !(params.envelope > 0.0)) {
    throw ValidationError("envelope bandwidth must be positive");
  }
  if (!std::isfinite(params.delta_omega) || !std::isfinite(params.phase)) {
    throw ValidationError("delta_omega and phase must be finite");
  }
}

void validate(const BeatingDataset& data) {
  const std::size_t n = data.delays_ps.size();
  if (n < 5 || data.counts.size() != n || data.sigmas.size() != n) {
    throw ValidationError("dataset needs equal-length delay/count/sigma lists of >= 5 points");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(data.delays_ps[i])) {
      throw ValidationError("delays must be finite");
    }
    if (i > 0 && !(data.delays_ps[i] > data.delays_ps[i - 1])) {
      throw ValidationError("delays must be strictly increasing");
    }
    if (data.counts[i] < 0 || !(data.sigmas[i] >= 0.0)) {
      throw ValidationError("counts and sigmas must be nonnegative");
    }
  }
}

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double beating_curve(const BeatingParams& params, double delay_ps) {
  validate(params);
  if (!std::isfinite(delay_ps)) {
    throw ValidationError("delay must be finite");
  }
  return params.amplitude *
         (1.0 - params.visibility * sinc(params.envelope * delay_ps) *
                    std::cos(params.delta_omega * delay_ps + params.phase));
}

std::vector<double> delay_grid(double span_ps, double step_ps) {
  if (!(span_ps > 0.0) || !(step_ps > 0.0) || step_ps > span_ps) {
    throw ValidationError("need span > 0 and 0 < step <= span");
  }
  const auto n = static_cast<std::int64_t>(std::floor(span_ps / step_ps + 1e-9));
  std::vector<double> delays;
  delays.reserve(static_cast<std::size_t>(n) + 1);
  const double center = static_cast<double>(n) / 2.0;
  for (std::int64_t i = 0; i <= n; ++i) {
    delays.push_back(step_ps * (static_cast<double>(i) - center));
  }
  return delays;
}

BeatingDataset synthesize_beating_dataset(const BeatingParams& params,
                                          const std::vector<double>& delays_ps,
                                          std::uint64_t seed,
                                          double integration_time_per_point_s) {
  validate(params);
  if (delays_ps.empty()) {
    throw ValidationError("delay list must not be empty");
  }
  for (std::size_t i = 1; i < delays_ps.size(); ++i) {
    if (!(delays_ps[i] > delays_ps[i - 1])) {
      throw ValidationError("delays must be strictly increasing");
    }
  }
  if (!(integration_time_per_point_s > 0.0)) {
    throw ValidationError("integration time per point must be positive");
  }

  rng::RandomStream stream(seed);
  BeatingDataset data;
  data.delays_ps = delays_ps;
  data.counts.reserve(delays_ps.size());
  data.sigmas.reserve(delays_ps.size());
  data.integration_time_per_point_s = integration_time_per_point_s;
  for (const double delay : delays_ps) {
    const std::int64_t n = stream.poisson(beating_curve(params, delay));
    data.counts.push_back(n);
    data.sigmas.push_back(std::sqrt(static_cast<double>(n)));
  }
  return data;
}

}  // namespace freqbin::beating
