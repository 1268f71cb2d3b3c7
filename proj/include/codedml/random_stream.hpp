#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace codedml {

/// Seeded random stream. Streams derived from the same (seed, key path) are
/// identical regardless of which thread consumes them.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {});

  /// Child stream keyed by this stream's seed material plus `key`.
  RandomStream derive(std::uint64_t key) const;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  /// Unit-rate exponential draw by inversion.
  double exponential();

  /// Standard normal draw (Box-Muller, no cached second value).
  double normal();

  /// Index drawn from a discrete distribution given by cumulative weights
  /// whose last entry is the total.
  std::size_t categorical(const double* cumulative, std::size_t count);

  std::mt19937_64& engine() { return engine_; }

 private:
  explicit RandomStream(std::uint64_t material, int);

  std::uint64_t material_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace codedml
