#pragma once

#include <numbers>

// CODATA 2018 values, SI units.
namespace prs::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double electron_mass_u = 5.48579909065e-4;    // u

/// Converts a frequency in Hz to an angular frequency in rad/s.
constexpr double angular(double hz) { return two_pi * hz; }
/// Converts an angular frequency in rad/s to Hz.
constexpr double hertz(double rad_per_s) { return rad_per_s / two_pi; }

// Neutral-atom masses (u). Singly charged ions subtract one electron mass.
inline constexpr double mass_mg24_atom = 23.985041697;
inline constexpr double mass_h1_atom = 1.00782503223;
inline constexpr double mass_ca40_atom = 39.962590863;

}  // namespace prs::constants
