#pragma once

#include <cstdint>

namespace rdb {

// Stateless counter-based generator (two SplitMix64 rounds over a mixed key).
// uniform(stream, counter) is a pure function of (key, stream, counter), so
// draws are reproducible regardless of evaluation order.
class counter_rng {
 public:
  explicit counter_rng(std::uint64_t seed, std::uint64_t domain = 0)
      : key_(mix(seed ^ (0x5851f42d4c957f2dULL * (domain + 1)))) {}

  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t z = mix(key_ + 0x9e3779b97f4a7c15ULL * (stream + 1));
    z = mix(z + 0x9e3779b97f4a7c15ULL * (counter + 1));
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t z = mix(key_ + 0x9e3779b97f4a7c15ULL * (stream + 1));
    return mix(z + 0x9e3779b97f4a7c15ULL * (counter + 1));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace rdb
