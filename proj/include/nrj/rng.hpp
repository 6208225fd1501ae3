#pragma once

// Seeded, splittable random streams. Every chain, replicate and bridge path
// owns its own stream, derived deterministically from a root seed, so runs
// reproduce bit-for-bit regardless of scheduling.

#include <cstdint>
#include <cmath>
#include <numbers>

namespace nrj {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t st = a * 0x9e3779b97f4a7c15ULL + b;
  std::uint64_t x = splitmix64(st);
  return splitmix64(st) ^ x;
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ seeded through splitmix64. split(i) derives a child stream
// whose state hashes (root seed, parent stream id, i); children with distinct
// indices are independent for Monte Carlo purposes and do not advance the
// parent.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) { reseed(seed, 0); }
  RngStream(std::uint64_t seed, std::uint64_t stream) { reseed(seed, stream); }

  RngStream split(std::uint64_t child) const {
    return RngStream(origin_, detail::mix64(stream_ + 1, child));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // uniform on (0, 1); never returns 0 so log(u) is finite
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer uniform on {0, ..., n-1}
  std::uint64_t uniform_index(std::uint64_t n) {
    // multiply-shift; bias ~n/2^64, negligible for n << 2^64
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void reseed(std::uint64_t seed, std::uint64_t stream) {
    origin_ = seed;
    stream_ = stream;
    std::uint64_t sm = seed ^ detail::mix64(0x6a09e667f3bcc909ULL, stream);
    for (auto& word : s_) word = detail::splitmix64(sm);
  }

  std::uint64_t s_[4]{};
  std::uint64_t origin_ = 0;
  std::uint64_t stream_ = 0;
};

}  // namespace nrj
