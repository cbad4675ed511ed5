#pragma once

#include <cstdint>
#include <span>

namespace stairgen {

// SplitMix64 finalizer. Every reference model derives its scores from this
// function so golden values are identical on every platform.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hash of (seed, ids). The sequence length is folded in last, so [] and [0]
// hash differently.
constexpr std::uint64_t hash_tokens(std::uint64_t seed,
                                    std::span<const std::int32_t> ids) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::int32_t id : ids) {
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(id)));
  }
  return mix64(h ^ (static_cast<std::uint64_t>(ids.size()) << 32));
}

// Top 53 bits mapped onto [0, 1).
constexpr double to_unit(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Deterministic stream of uniform doubles in [0, 1), used by tests and
// benchmark fixtures that need portable pseudo-random input.
class SplitMixStream {
 public:
  explicit constexpr SplitMixStream(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    std::uint64_t out = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }
  constexpr double next_unit() noexcept { return to_unit(next_u64()); }
  // Uniform integer in [0, bound). bound must be positive.
  constexpr std::uint64_t next_below(std::uint64_t bound) noexcept {
    return next_u64() % bound;
  }

 private:
  std::uint64_t state_;
};

}  // namespace stairgen
