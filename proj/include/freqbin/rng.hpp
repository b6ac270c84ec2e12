#pragma once

#include <cstdint>
#include <random>

namespace freqbin::rng {

// Deterministic sub-stream seed for (seed, index) pairs. Bootstrap replicates
// and the individual simulator outputs each get their own stream so results
// are independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Seeded random stream with fully specified samplers. std::poisson_distribution
// and friends are implementation-defined, which would break the golden-file
// determinism contract across standard libraries; the samplers here are spelled
// out so identical seeds give identical draws everywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1), 53 random bits.
  double uniform();

  // Gaussian via Box-Muller (cosine branch only).
  double normal(double mean, double sigma);

  // Exact Poisson sampling: Knuth inversion below mean 10, Hormann's
  // transformed rejection (PTRS) above.
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace freqbin::rng
