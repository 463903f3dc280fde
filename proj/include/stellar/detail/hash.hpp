#pragma once

#include <cstdint>
#include <string_view>

namespace stellar::detail {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a_step(std::uint64_t h, unsigned char byte) {
  return (h ^ byte) * kFnvPrime;
}

constexpr std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffsetBasis) {
  for (unsigned char c : bytes) h = fnv1a_step(h, c);
  return h;
}

// FNV-1a over `bytes` with one seed byte fed before the payload.
constexpr std::uint64_t fnv1a_seeded(unsigned char seed, std::string_view bytes) {
  return fnv1a(bytes, fnv1a_step(kFnvOffsetBasis, seed));
}

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

}  // namespace stellar::detail
