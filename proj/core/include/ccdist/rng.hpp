#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ccdist/linalg.hpp"

namespace ccdist {

// Seeded generator with platform-independent real distributions
// (std::uniform_real_distribution is implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t next() { return engine_(); }

  int index(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

  Vec unit_vector(int dim) {
    Vec v(dim);
    double norm = 0.0;
    while (norm < 1e-12) {
      for (int i = 0; i < dim; ++i) v(i) = normal();
      norm = v.norm();
    }
    return v / norm;
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes several integers into one seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ccdist
