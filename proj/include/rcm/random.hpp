#pragma once

// Counter-based random values: every draw is a pure function of
// (key, counter words), so any value can be regenerated in O(1) without
// stored state and independent of evaluation order.

#include <cstdint>

namespace rcm::random {

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Role tags separating the independent streams of one ensemble.
enum class Stream : std::uint64_t {
  arrivals = 0x61727269ULL,
  points = 0x706f696eULL,
  pairs = 0x70616972ULL,
};

constexpr std::uint64_t stream_key(std::uint64_t seed, Stream stream) noexcept {
  return mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) + golden_gamma * static_cast<std::uint64_t>(stream));
}

constexpr std::uint64_t hash(std::uint64_t key, std::uint64_t a) noexcept {
  return mix64(key + golden_gamma * (a + 1));
}

constexpr std::uint64_t hash(std::uint64_t key, std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(hash(key, a) ^ (0xd1b54a32d192ed03ULL * (b + 1)));
}

// Map the top 52 bits to the open interval (0, 1); the half offset keeps
// both endpoints out and is exactly representable.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Seed of replication `index` derived from a parent seed. Injective in
// `index` for a fixed parent (odd-multiplier affine map followed by a bijection).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent) + golden_gamma * (index + 1));
}

}  // namespace rcm::random
