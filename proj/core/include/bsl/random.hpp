#pragma once

#include <cstdint>
#include <span>

namespace bsl {

/// Splittable counter-based random stream.
///
/// A stream is identified by a 64-bit master seed and a derivation path of
/// nonnegative integers (replica index, particle lineage, substream tag...).
/// Identical (seed, path) pairs produce bitwise-identical draw sequences on
/// every platform, independent of scheduling. Child streams are derived by
/// hashing and never share state with the parent.
class RandomStream {
 public:
  RandomStream() : state_(mix(0x9e3779b97f4a7c15ull)) {}
  explicit RandomStream(std::uint64_t master_seed) : state_(mix(master_seed ^ 0x5851f42d4c957f2dull)) {}

  static RandomStream from_path(std::uint64_t master_seed, std::span<const std::uint64_t> path) {
    RandomStream s(master_seed);
    for (std::uint64_t p : path) s = s.child(p);
    return s;
  }

  /// Derive an independent stream; the parent is left untouched.
  [[nodiscard]] RandomStream child(std::uint64_t index) const {
    RandomStream s;
    s.state_ = mix(state_ ^ (mix(index + 0x9e3779b97f4a7c15ull) | 1ull));
    return s;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform on [0,1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1); never returns an exact endpoint.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with the given rate.
  double next_exponential(double rate);

  /// Exact Poisson draw (inversion for small means, PTRS otherwise).
  std::uint64_t next_poisson(double mean);

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace bsl
