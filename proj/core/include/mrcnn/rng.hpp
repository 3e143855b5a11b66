#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mrcnn {

// Deterministic random source. Only the raw mt19937_64 stream is used, which
// the standard fully specifies, so draws are identical across platforms and
// standard libraries (std::*_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  // Seeds from several integers, e.g. {run_seed, epoch, example}.
  Rng(std::initializer_list<std::uint64_t> parts);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace mrcnn
