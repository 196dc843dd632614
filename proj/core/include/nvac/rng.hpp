#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nvac/constants.hpp"

namespace nvac {

// Deterministic standard-normal stream. mt19937_64 output is pinned by the
// standard and Box-Muller avoids std::normal_distribution, whose sequence is
// implementation-defined; identical seeds therefore give identical noise
// across builds.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(two_pi * u2);
    have_spare_ = true;
    return mag * std::cos(two_pi * u2);
  }

 private:
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nvac
