#include "freqbin/rng.hpp"

#include <cmath>
#include <cstdint>

#include "freqbin/constants.hpp"
#include "freqbin/errors.hpp"

namespace freqbin::rng {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a golden-ratio stride; distinct indices give
  // well-separated engine seeds.
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal(double mean, double sigma) {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

namespace {

// Knuth inversion by multiplication; exact for small means.
std::int64_t poisson_small(RandomStream& stream, double mean,
                           double (RandomStream::*uni)()) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double product = 1.0;
  do {
    ++k;
    product *= (stream.*uni)();
  } while (product > limit);
  return k - 1;
}

}  // namespace

std::int64_t RandomStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ValidationError("poisson mean must be finite and nonnegative");
  }
  if (mean == 0.0) {
    return 0;
  }
  if (mean < 10.0) {
    return poisson_small(*this, mean, &RandomStream::uniform);
  }

  // Hormann's PTRS transformed rejection, exact for mean >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);

  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const auto k = static_cast<std::int64_t>(
        std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= v_r) {
      return k;
    }
    if (k < 0 || (us < 0.013 && v > us)) {
      continue;
    }
    const double lhs = std::log(v) + std::log(inv_alpha) -
                       std::log(a / (us * us) + b);
    const double rhs = -mean + static_cast<double>(k) * log_mean -
                       std::lgamma(static_cast<double>(k) + 1.0);
    if (lhs <= rhs) {
      return k;
    }
  }
}

}  // namespace freqbin::rng
