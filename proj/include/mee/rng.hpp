#pragma once

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace mee {

/// SplitMix64 finalizer. Used both as the stream mixer and to derive keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw k of stream `key` is mix(key, k). Streams
/// are addressed by a tuple of integers (global seed, n, trial, purpose, ...)
/// so every trial of a sweep is reproducible regardless of execution order.
///
/// Satisfies UniformRandomBitGenerator; samplers use the members below
/// rather than std distributions, whose output varies between libraries.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key = 0) : key_(mix64(key)) {}
  Rng(std::initializer_list<std::uint64_t> parts) : key_(0x2545f4914f6cdd1dULL) {
    for (auto p : parts) key_ = mix64(key_ ^ mix64(p));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

  /// Derives an independent child stream.
  Rng split(std::uint64_t purpose) const { return Rng{key_, purpose}; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform in (0, 1); safe for log().
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Boost.Random transforms give the same draws on every platform.
  double normal() { return boost::random::normal_distribution<double>{}(*this); }
  double exponential() { return boost::random::exponential_distribution<double>{}(*this); }

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace mee
