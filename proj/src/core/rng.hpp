#pragma once

#include <cmath>
#include <cstdint>

namespace lab {

/// Seed for a deterministic sampling stream. Trial i of a sweep runs on
/// base_seed XOR i so parallel trials never share generator state.
struct Seed {
  std::uint64_t value = 0;
};

/// Counter-based splittable generator (splitmix64 core). The stream depends
/// only on the seed, never on the platform or standard library, so sampling
/// is bit-identical across runs.
class Rng {
public:
  explicit Rng(Seed seed) : state_(seed.value) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). Unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller (cosine branch; two draws per call).
  double next_normal() {
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Derive an independent stream.
  Rng split() { return Rng(Seed{next_u64()}); }

private:
  std::uint64_t state_;
};

}  // namespace lab
