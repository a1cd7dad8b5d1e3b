#pragma once

#include <cstdint>

namespace hlab {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so results never depend on call order or threads.
// The mixing function is SplitMix64's finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept {
    std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ULL * (counter + 1) +
                      0xD1B54A32D192ED03ULL * (stream_ + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }

  CounterRng substream(std::uint64_t stream) const noexcept {
    return CounterRng(seed_, stream_ * 0x100000001B3ULL + stream + 1);
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace hlab
