// units.hpp — Physical constants and the Hz <-> rad/s boundary conversions

#pragma once

#include <numbers>

namespace wgheat::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018 exact / recommended values (SI).
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double planck = 6.62607015e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J / K
inline constexpr double electron_volt = 1.602176634e-19; // J

// Everything internal is angular (rad/s). Files and the CLI speak Hz.
constexpr double hz_to_rad(double hz) { return two_pi * hz; }
constexpr double rad_to_hz(double rad) { return rad / two_pi; }

constexpr double mk_to_kelvin(double mk) { return mk * 1e-3; }
constexpr double kelvin_to_mk(double k) { return k * 1e3; }
constexpr double uev_to_joule(double uev) { return uev * 1e-6 * electron_volt; }

// Quantum of energy carried by one photon at angular frequency omega.
constexpr double photon_energy(double omega) { return hbar * omega; }

} // namespace wgheat::units
