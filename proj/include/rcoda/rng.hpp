#pragma once

#include <cstdint>
#include <random>

namespace rcoda {

using RngSeed = std::uint64_t;

// splitmix64 finalizer; used to derive statistically independent streams
// from (master seed, task indices) without any coordination between workers.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline RngSeed derive_seed(RngSeed master, std::uint64_t a, std::uint64_t b = 0,
                           std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(master ^ 0xA5A5A5A5A5A5A5A5ULL);
  s = splitmix64(s + a);
  s = splitmix64(s + b);
  s = splitmix64(s + c);
  return s;
}

// Thin wrapper over mt19937_64 with the handful of draws the samplers need.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed) {}

  // uniform on [0,1) with 53 random bits
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  double gamma(double shape, double scale) {
    return std::gamma_distribution<double>(shape, scale)(engine_);
  }

  // index in [0, n)
  int uniform_int(int n) {
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

  // inverse-CDF draw from unnormalized weights w[0..n)
  int categorical(const double* w, int n, double wsum) {
    double u = uniform01() * wsum;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return n - 1;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rcoda
