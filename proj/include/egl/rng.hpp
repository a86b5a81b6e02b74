#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>

namespace egl {

/// Counter-based stream: output i is the SplitMix64 finalizer applied to
/// key + (i+1)*golden, where key is derived from (seed, stream). Any output
/// can be recomputed from (seed, stream, i) alone.
class CounterRng {
public:
  static constexpr std::string_view name = "splitmix64-counter";
  static constexpr int version = 1;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + kGolden))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(key_ + (++counter_) * kGolden); }
  std::uint64_t counter() const { return counter_; }

  /// uniform in [0,1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
  long long integer(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// complex number with modulus in [rmin, rmax] and uniform argument
  std::complex<double> annulus(double rmin, double rmax) {
    double r = uniform(rmin, rmax);
    double a = uniform(0.0, 2.0 * M_PI);
    return std::polar(r, a);
  }
  std::complex<double> box(double half) {
    return {uniform(-half, half), uniform(-half, half)};
  }

private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// FNV-1a, used to derive independent stream ids from labels.
inline std::uint64_t stream_id(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace egl
