#pragma once

#include <cstdint>
#include <random>

namespace edfq {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded uniform stream. Substreams derived from (seed, tag) are independent
// for distinct tags; uniform01 uses the top 53 bits so draws are identical
// across platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(splitmix64(seed)) {}
  RngStream(std::uint64_t seed, std::uint64_t tag)
      : gen_(splitmix64(splitmix64(seed) ^ splitmix64(tag * 0x9e3779b97f4a7c15ULL + 1))) {}

  std::uint64_t next_u64() { return gen_(); }

  // in [0, 1)
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace edfq
