#pragma once

#include <cmath>

#include "nvac/constants.hpp"

namespace nvac {

// Wrap to [0, 2*pi).
inline double wrap_to_2pi(double a) {
  double w = std::fmod(a, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

// Wrap to (-pi, pi].
inline double wrap_to_pi(double a) {
  double w = std::fmod(a + pi, two_pi);
  if (w <= 0.0) w += two_pi;
  return w - pi;
}

// Signed circular difference a - b, wrapped to (-pi, pi].
inline double circular_diff(double a, double b) { return wrap_to_pi(a - b); }

}  // namespace nvac
