#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

/**
 * Counter-based random number generation.
 *
 * Every random quantity in the library is derived from an explicit key chain
 *     key = chain(chain(master_seed, stream_tag), index, ...)
 * so that any element of any random object (a sample point, one matrix entry,
 * one Wishart factor element) can be generated independently of every other.
 * This makes results independent of blocking granularity, evaluation order,
 * and worker count.
 */
namespace svplab::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer: a bijective mixer on 64-bit integers.
constexpr std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child key from a parent key and an index.
constexpr std::uint64_t chain(std::uint64_t key, std::uint64_t index) {
  return mix(key + kGolden * (index + 1));
}

/// Stream tags: one per independent random object class.
enum class StreamTag : std::uint64_t {
  points = 1,
  labels = 2,
  target = 3,
  features = 4,
  wishart = 5,
  risk_points = 6,
  trial = 7,
  instance = 8,
};

constexpr std::uint64_t chain(std::uint64_t key, StreamTag tag) {
  return chain(key, static_cast<std::uint64_t>(tag));
}

/// Uniform double in [0, 1) from a raw 64-bit word (53-bit mantissa).
constexpr double to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1]: safe as a logarithm argument.
constexpr double to_unit_positive(std::uint64_t x) {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

/**
 * A deterministic stream of draws under one key. The i-th raw word is
 * mix(key + kGolden*(i+1)); state is just the counter, so a stream can be
 * reconstructed from (key, counter) at any point.
 */
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix(key_ + kGolden * (++counter_)); }

  double uniform() { return to_unit(next_u64()); }

  /// Standard normal via Box-Muller; draws two words per pair, caches the
  /// second value.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = to_unit_positive(next_u64());
    const double u2 = to_unit(next_u64());
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  /**
   * Gamma(shape, 1) by the Marsaglia-Tsang squeeze; shape < 1 handled through
   * the Gamma(shape+1) boost. The rejection loop consumes a variable number
   * of words, which is fine because every consumer owns a private key.
   */
  double gamma(double shape) {
    if (shape <= 0.0) throw std::domain_error("gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = to_unit_positive(next_u64());
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = to_unit_positive(next_u64());
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace svplab::rng
