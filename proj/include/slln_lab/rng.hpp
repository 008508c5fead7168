#pragma once

#include <cstdint>
#include <limits>

namespace slln {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * Counter-based random stream.
 *
 * Draw number c (0-based) of a stream seeded with s is
 * mix64(mix64(s) + (c + 1) * 0x9E3779B97F4A7C15), i.e. SplitMix64 run from the
 * hashed seed. The output depends only on (seed, counter), so a stream can be
 * copied, moved to another thread, or re-created at any position. Distinct
 * seeds hash to unrelated starting points; replication r of an experiment uses
 * seed base_seed + r.
 *
 * Every uniform and exponential variate consumes exactly one draw; a normal
 * variate (Box-Muller, cosine branch) consumes two.
 */
class SeededStream {
 public:
  using result_type = std::uint64_t;

  explicit SeededStream(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : seed_(seed), key_(mix64(seed)), counter_(counter) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double next_uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Unit-rate exponential by inversion.
  double next_exponential() noexcept;

  /// Standard normal (Box-Muller, two draws).
  double next_normal() noexcept;

  // UniformRandomBitGenerator
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace slln
