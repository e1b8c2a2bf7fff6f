#pragma once

#include <numbers>

namespace combgate::constants {

// CODATA 2018 exact/recommended values, SI.
inline constexpr double c = 299792458.0;                 // m/s
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double eps0 = 8.8541878128e-12;         // F/m
inline constexpr double e = 1.602176634e-19;             // C
inline constexpr double a0 = 5.29177210903e-11;          // m
inline constexpr double amu = 1.66053906660e-27;         // kg
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Dipole unit e*a0 in C m. Dipoles are stored in this unit throughout.
inline constexpr double ea0 = e * a0;

/// Converts a field expressed as e*a0*E/hbar (rad/s) into V/m.
inline constexpr double rabi_to_field = hbar / ea0;

/// Converts a wavenumber in cm^-1 to an angular frequency in rad/s.
inline constexpr double wavenumber_to_omega = two_pi * c * 100.0;

}  // namespace combgate::constants
