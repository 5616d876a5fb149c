#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace eprqkd {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Distinct (master, index) pairs give
/// unrelated streams, so sessions can run in any order or concurrently.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Deterministic random source. Wraps mt19937_64 with distribution helpers that
/// do not depend on the standard library's (implementation-defined)
/// distributions, so streams are reproducible across toolchains.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Independent child stream; does not advance this generator.
  Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_hint(), index)); }

  bool bit() { return (engine_() >> 63) != 0; }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t seed_hint() const {
    std::mt19937_64 copy = engine_;
    return copy();
  }

  std::mt19937_64 engine_;
};

}  // namespace eprqkd
