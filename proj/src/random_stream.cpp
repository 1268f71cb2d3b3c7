#include "codedml/random_stream.hpp"

#include <cmath>
#include <numbers>

namespace codedml {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t mix_key(std::uint64_t material, std::uint64_t key) {
  std::uint64_t state = material ^ (key * 0xd1b54a32d192ed03ULL);
  return splitmix64(state);
}

std::mt19937_64 seeded_engine(std::uint64_t material) {
  std::uint64_t state = material;
  std::uint32_t words[8];
  for (int i = 0; i < 8; i += 2) {
    const std::uint64_t v = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(v);
    words[i + 1] = static_cast<std::uint32_t>(v >> 32);
  }
  std::seed_seq seq(std::begin(words), std::end(words));
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t material, int)
    : material_(material), engine_(seeded_engine(material)) {}

RandomStream::RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
    : material_(0), engine_() {
  std::uint64_t m = mix_key(0x6a09e667f3bcc908ULL, seed);
  for (auto k : keys) m = mix_key(m, k);
  material_ = m;
  engine_ = seeded_engine(m);
}

RandomStream RandomStream::derive(std::uint64_t key) const {
  return RandomStream(mix_key(material_, key), 0);
}

double RandomStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log1p(-uniform01()); }

double RandomStream::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RandomStream::categorical(const double* cumulative, std::size_t count) {
  const double target = uniform01() * cumulative[count - 1];
  std::size_t lo = 0;
  std::size_t hi = count - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (target < cumulative[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace codedml
