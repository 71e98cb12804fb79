#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace wpcn::sim {

/// Counter-based generator keyed by a SplitMix64 hash chain. A stream is a
/// key; substream(id) derives an independent child key, so any draw can be
/// addressed by (seed, path of ids, counter) regardless of evaluation order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) : key_(mix(seed ^ kSeedSalt)) {}

  CounterRng substream(std::uint64_t id) const {
    CounterRng child;
    child.key_ = mix(key_ ^ mix(id + kStreamSalt));
    return child;
  }

  result_type operator()() { return mix(key_ + kGolden * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unit-mean exponential.
  double exponential() { return -std::log1p(-uniform()); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x5851f42d4c957f2dULL;
  static constexpr std::uint64_t kStreamSalt = 0x2545f4914f6cdd1dULL;

  static std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace wpcn::sim
