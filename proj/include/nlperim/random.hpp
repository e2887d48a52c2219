#pragma once

// Seeded, platform-independent uniform sampling. std::uniform_real_distribution
// is implementation-defined, so doubles are built from the top 53 bits directly.

#include <cstdint>
#include <random>
#include <span>

namespace nlperim {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform point in the ball of radius r (rejection from the cube).
  void in_ball(std::span<double> out, double r = 1.0) {
    while (true) {
      double q = 0.0;
      for (double& x : out) {
        x = uniform(-r, r);
        q += x * x;
      }
      if (q < r * r) return;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nlperim
