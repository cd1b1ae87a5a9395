#pragma once

#include <numbers>

namespace franson {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Vacuum wavelength in nm for a frequency in THz, and back.
constexpr double thz_to_nm(double thz) { return kSpeedOfLight / thz * 1e-3; }
constexpr double nm_to_thz(double nm) { return kSpeedOfLight / nm * 1e-3; }

}  // namespace franson
