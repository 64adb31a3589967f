#pragma once

#include <cstdint>

namespace rtlab {

// splitmix64: tiny, well-mixed, and identical on every platform. All noise in
// the repository flows through this so that reruns (including multi-threaded
// sweeps) are byte-identical for a given seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53-bit resolution
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [-amplitude, amplitude)
  double next_symmetric(double amplitude) { return (2.0 * next_unit() - 1.0) * amplitude; }

 private:
  std::uint64_t state_;
};

// Derive an independent stream for a substream index (noise draw, sweep point).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  SplitMix64 g(seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL));
  return g.next_u64();
}

}  // namespace rtlab
