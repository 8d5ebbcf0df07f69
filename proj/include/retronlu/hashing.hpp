#pragma once

#include <cstdint>
#include <string_view>

namespace retronlu {

// 64-bit FNV-1a; the offset basis is XORed with `seed` so independent
// feature streams stay decorrelated.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// splitmix64: minimal seeded generator, pinned for cross-language
// reproducibility of shuffles and sampled policies.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) by modulo; bias is irrelevant at corpus scale and
  // the modulo form is trivially portable.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace retronlu
