#ifndef PROMO_SEEDS_HPP
#define PROMO_SEEDS_HPP

#include <cstdint>
#include <string_view>

namespace promo {

// splitmix64 finalizer; used both as a mixer and as a stream derivation step.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derived seed for an independent stochastic stage. Stages are keyed by a
// label (e.g. document id) and an index (e.g. trial number) so that parallel
// execution order cannot change any stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index = 0) {
  return mix64(mix64(master ^ fnv1a(label)) ^ index);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ index);
}

}  // namespace promo

#endif
