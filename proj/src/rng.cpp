#include "ulab/rng.hpp"

namespace ulab {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

std::uint64_t mix(std::uint64_t v) noexcept {
  std::uint64_t state = v;
  return splitmix64(state);
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

Xoshiro256 substream(std::uint64_t master_seed, std::uint64_t index, StreamDomain domain) noexcept {
  std::uint64_t key = mix(master_seed ^ mix(static_cast<std::uint64_t>(domain)));
  key = mix(key ^ mix(index + 0x632BE59BD9B4E019ULL));
  return Xoshiro256(key);
}

}  // namespace ulab
