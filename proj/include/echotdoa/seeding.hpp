#pragma once

#include <cstdint>

namespace echotdoa {

/// Finalizer of the splitmix64 generator: a cheap, well-mixing 64-bit
/// permutation used to derive independent seed streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a stream index; distinct
/// indices give decorrelated streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

}  // namespace echotdoa
