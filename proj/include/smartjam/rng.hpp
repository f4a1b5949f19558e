#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace smartjam {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Combine a master seed with a sequence of counters into a stream seed.
template <typename... Ts>
constexpr std::uint64_t derive_seed(std::uint64_t master, Ts... counters) {
  std::uint64_t s = mix64(master);
  ((s = mix64(s ^ static_cast<std::uint64_t>(counters))), ...);
  return s;
}

/// mt19937_64 with distribution code written out here so draws are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

  bool bit() { return (engine_() >> 63) != 0; }

  double normal();

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> cnormal(double variance = 1.0);

  Rng fork(std::string_view tag) { return Rng(derive_seed(engine_(), hash_tag(tag))); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace smartjam
