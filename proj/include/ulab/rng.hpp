#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ulab {

/// Advances @p state and returns the next SplitMix64 output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * xoshiro256** seeded from a single 64-bit value through SplitMix64.
 * Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
 */
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Stream families, so that noise and sampled controls never share a stream.
enum class StreamDomain : std::uint64_t {
  noise = 1,
  level_set = 2,
  control_ball = 3,
  direction = 4,
};

/// Independent generator for the pair (master_seed, index) within a domain.
Xoshiro256 substream(std::uint64_t master_seed, std::uint64_t index,
                     StreamDomain domain = StreamDomain::noise) noexcept;

}  // namespace ulab
