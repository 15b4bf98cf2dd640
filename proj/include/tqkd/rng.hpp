// Counter-based random stream: every (seed, stream) pair gets an independent
// SplitMix64 sequence, so a round's draws depend only on the seed and the
// round index and never on how rounds are split across workers.
#pragma once

#include <cstdint>

namespace tqkd {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(splitmix64_mix(seed ^ splitmix64_mix(stream * kGolden + 0x632be59bd9b4e019ULL))) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return splitmix64_mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., bound - 1}; bias is below bound / 2^64.
  constexpr std::uint32_t below(std::uint32_t bound) noexcept {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace tqkd
