#pragma once

#include <cstdint>
#include <random>

#include "sczlab/grid.hpp"

namespace sczlab {

// Deterministic uniform stream. std::uniform_real_distribution is
// implementation-defined, so draws are built from raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // log-uniform in [a, b], a > 0
  double log_uniform(double a, double b) {
    return a * std::exp(uniform() * std::log(b / a));
  }

  int uniform_int(int lo, int hi) {  // inclusive range
    return lo + static_cast<int>(uniform() * (static_cast<double>(hi - lo) + 1.0));
  }

  Point point_in_box(int d, double L) {
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) p[a] = uniform(-L, L);
    return p;
  }

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_;
};

}  // namespace sczlab
