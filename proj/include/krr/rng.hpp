#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace krr {

namespace detail {

// SplitMix64 step; used to derive independent engine seeds from a
// (seed, m, trial) tuple so that streams never overlap by construction.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic random stream. The engine is std::mt19937_64 (its output
/// sequence is pinned by the standard); uniform and normal variates are
/// produced by fixed arithmetic rather than std::*_distribution, whose
/// algorithms are implementation-defined. This keeps outputs byte-stable
/// across compilers and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derive a stream keyed by up to three coordinates. Streams for distinct
  /// keys are independent for all practical purposes.
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                    std::uint64_t c = 0) {
    std::uint64_t state = seed;
    std::uint64_t mix = detail::splitmix64(state);
    state ^= a * 0x9e3779b97f4a7c15ULL;
    mix ^= detail::splitmix64(state);
    state ^= b * 0xc2b2ae3d27d4eb4fULL;
    mix ^= detail::splitmix64(state);
    state ^= c * 0x165667b19e3779f9ULL;
    mix ^= detail::splitmix64(state);
    return Rng(mix);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller. Consumes exactly two uniforms per call;
  /// no cached spare, so the consumption pattern is position-independent.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    // Guard the log against u1 == 0.
    u1 = u1 > 0 ? u1 : 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Uniform integer in [0, n). Rejection-free modulo is acceptable here:
  /// n is always tiny relative to 2^64 so the bias is unobservable.
  std::uint64_t integer(std::uint64_t n) { return engine_() % n; }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace krr
