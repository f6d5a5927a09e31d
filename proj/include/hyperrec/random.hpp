#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace hyperrec {

// Stable 64-bit FNV-1a; used wherever a string must feed a seed or a
// fingerprint, so results do not depend on std::hash.
inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a tuple of counters, e.g.
// (seed, vertex, iteration). Order of the parts matters.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

using Engine = std::mt19937_64;

/// SplitMix64 stream: a few arithmetic ops per draw, for hot loops where
/// mt19937_64's state refresh dominates (skip-gram noise sampling).
class FastEngine {
 public:
  using result_type = std::uint64_t;
  explicit FastEngine(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    const result_type out = splitmix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

 private:
  std::uint64_t state_;
};

inline Engine make_engine(std::initializer_list<std::uint64_t> parts) {
  return Engine(derive_seed(parts));
}

// Uniform double in [0, 1) from the top 53 bits.
template <class Gen = Engine>
inline double uniform01(Gen& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

__extension__ using Uint128 = unsigned __int128;

/// Unbiased integer in [0, n) by Lemire's multiply-shift rejection; n > 0.
template <class Gen = Engine>
inline std::uint64_t uniform_below(Gen& eng, std::uint64_t n) {
  Uint128 m = static_cast<Uint128>(eng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<Uint128>(eng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace hyperrec
