#pragma once

#include <cstdint>
#include <random>

namespace adaprod {

/// SplitMix64 step: mixes the state and returns the next value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic random source. Independent streams are derived from a
/// master seed and a stream tag so that environment, learner and sampler
/// draws never interleave.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t master, std::uint64_t stream_tag) {
    std::uint64_t s = master;
    splitmix64(s);
    s ^= 0xD1B54A32D192ED03ull * (stream_tag + 1);
    return Rng(splitmix64(s));
  }

  double uniform01() { return unit_(engine_); }
  double gaussian() { return normal_(engine_); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace adaprod
