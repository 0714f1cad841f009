#pragma once

#include <cstdint>
#include <random>

namespace bohmlab {

/// splitmix64 finalizer; used to derive per-member seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of ensemble member i. Members are independent of evaluation order.
constexpr std::uint64_t member_seed(std::uint64_t seed, std::uint64_t i) { return seed ^ mix64(i); }

/// mt19937_64 with a portable uniform mapping, so sample streams are
/// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bohmlab
