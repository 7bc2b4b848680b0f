#pragma once

#include <cstdint>
#include <random>

namespace hmtsp {

// Seeded pseudo-random stream. The engine (mt19937_64) is fully specified by
// the standard; the conversions below are implemented here instead of using
// std::*_distribution so that streams are identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  // Independent child stream; used to give every instance of a batch its own seed.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace hmtsp
