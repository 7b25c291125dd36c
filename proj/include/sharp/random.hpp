#pragma once

#include <cstdint>
#include <string_view>

#include "sharp/linalg.hpp"

namespace sharp {

/// Counter-based seed splitting. A trial's generator depends only on
/// (master seed, stream, counter), so trials can run in any order.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t stream_id(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                           std::uint64_t counter) noexcept {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + counter);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream = 0, std::uint64_t counter = 0) {
  return Rng(derive_seed(master, stream, counter));
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace sharp
