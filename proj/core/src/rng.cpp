#include "hmtsp/rng.hpp"

#include <stdexcept>

namespace hmtsp {

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("uniform_index: bound must be positive");
  }
  // Rejection sampling on the top of the range removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x = engine_();
  while (x >= limit) {
    x = engine_();
  }
  return x % bound;
}

std::uint64_t Rng::derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over base + golden-ratio stride
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace hmtsp
