#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace netcp {

/// SplitMix64 finalizer. Used to turn (seed, stream index) pairs into
/// well-separated 64-bit seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the k-th replicate: master XOR k.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t k) noexcept {
  return master ^ k;
}

/// Seed of an independent sub-stream (e.g. one snapshot t) of a seed.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

/// Random source used everywhere in the library.
///
/// Engine: std::mt19937_64 seeded with splitmix64(seed). Uniform doubles take
/// the top 53 bits of one engine output, so streams are reproducible across
/// standard libraries (std::uniform_real_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal by Box-Muller (one value per call, the pair is not cached).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace netcp
