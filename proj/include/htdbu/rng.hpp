#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace htdbu {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for sub-stream `stream` of `seed`. Stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;

// Portable random source. The standard distributions are implementation
// defined, so every draw here is computed from raw mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }
  // [0, 1)
  double uniform();
  // (0, 1)
  double open_uniform();
  // Uniform integer in [0, n). n must be > 0.
  std::size_t index(std::size_t n);
  double normal();
  // Index drawn proportionally to non-negative weights (sum > 0).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace htdbu
