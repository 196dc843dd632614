#pragma once

#include <numbers>

// Unit conventions used throughout: SI base units (tesla, hertz, seconds,
// meters) and radians for every phase. All frequencies named "angular" or
// carrying rad/s units include the 2*pi factor explicitly.

namespace nvac {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Electronic-spin gyromagnetic ratio, angular convention [rad s^-1 T^-1].
inline constexpr double gamma_nv = two_pi * 28.0e9;

// Ground-state zero-field splitting [rad/s]. Enters only through the MW
// carrier frequency; the rotating-frame propagator never sees it unless the
// rotating-wave approximation is switched off for validation runs.
inline constexpr double zero_field_splitting = two_pi * 2.87e9;

}  // namespace nvac
