#pragma once

#include <cstdint>
#include <random>

namespace keysel {

// Source of 64-bit random words. Everything stochastic in the library draws
// through this interface so that tests can substitute scripted sources.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual std::uint64_t next_u64() = 0;

  // Uniform integer in [0, n). n must be positive. Uses rejection on the
  // high bits so results do not depend on the standard library's
  // distribution implementation.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_unit();

  bool bernoulli(double p) { return uniform_unit() < p; }
};

// Seeded Mersenne Twister; the only production generator.
class Rng final : public RandomSource {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next_u64() override { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and a stream tag
// (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace keysel
