#pragma once

#include <cmath>
#include <cstdint>

namespace hetsim {

// Counter-based random streams. Every stream is a pure function of its key
// (seed, t, m, purpose), so draws do not depend on evaluation order and the
// whole simulation is reproducible under concurrent scheduling evaluation.

enum class StreamPurpose : std::uint64_t {
  topology = 1,
  shadowing = 2,
  channel = 3,
  pattern = 4,
  pilot = 5,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t t, std::uint64_t m, StreamPurpose purpose) {
    std::uint64_t s = detail::splitmix64(seed);
    s = detail::splitmix64(s ^ (0x2545f4914f6cdd1dULL + t));
    s = detail::splitmix64(s ^ (0x9e3779b97f4a7c15ULL * (m + 1)));
    state_ = detail::splitmix64(s ^ static_cast<std::uint64_t>(purpose));
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Unit-mean exponential (Rayleigh fading power).
  double exponential() { return -std::log(uniform()); }

  // Standard normal via Box-Muller; draws two uniforms per call.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Inverse-transform Poisson; fine for the small means used here.
  int poisson(double mean) {
    const double limit = std::exp(-mean);
    double prod = 1.0;
    int count = -1;
    do {
      prod *= uniform();
      ++count;
    } while (prod > limit);
    return count;
  }

 private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
};

}  // namespace hetsim
