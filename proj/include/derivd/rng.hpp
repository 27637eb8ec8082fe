#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace derivd {

/// SplitMix64, used to expand a single 64-bit seed into generator state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna). Seeded through SplitMix64 so that
/// every implementation reproduces the same stream from the same seed.
///
/// Only integer arithmetic is used in the generator and in the derived
/// helpers, so outputs are identical across platforms and standard libraries
/// (unlike std::uniform_*_distribution, whose algorithms are unspecified).
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);
  explicit Xoshiro256(const std::array<std::uint64_t, 4>& state) : s_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform01();

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

  const std::array<std::uint64_t, 4>& state() const { return s_; }

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Stateless 64-bit mixer for deriving independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace derivd
