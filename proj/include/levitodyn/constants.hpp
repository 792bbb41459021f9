#pragma once

#include <numbers>

// Fundamental constants (CODATA 2018) and a few material/gas reference
// values. Everything in this project is SI; angular frequencies are rad/s
// internally and become Hz (omega/2pi) only in CSV/JSON output columns
// suffixed `_Hz`.

namespace levitodyn::constants {

inline constexpr double pi = std::numbers::pi;

/// Speed of light in vacuum [m/s].
inline constexpr double c = 2.99792458e8;
/// Reduced Planck constant [J s].
inline constexpr double hbar = 1.054571817e-34;
/// Boltzmann constant [J/K].
inline constexpr double kB = 1.380649e-23;
/// Vacuum permittivity [F/m].
inline constexpr double eps0 = 8.8541878128e-12;

/// Mean molecular mass of air (28.97 u) [kg].
inline constexpr double air_molecular_mass = 4.81e-26;
/// Effective collision diameter of air molecules [m]; used only for the
/// mean-free-path estimate behind the free-molecular-regime warning.
inline constexpr double air_collision_diameter = 3.7e-10;

/// 1 Torr in Pa.
inline constexpr double torr = 101325.0 / 760.0;

/// Proton magnetic moment [J/T].
inline constexpr double proton_magnetic_moment = 1.41060679736e-26;
/// Bohr magneton [J/T].
inline constexpr double bohr_magneton = 9.2740100783e-24;

} // namespace levitodyn::constants

namespace levitodyn {

/// CODATA constants bundled as a value type for code that wants to pass
/// them around explicitly (defaults are the only supported values).
struct PhysicalConstants {
  double c = constants::c;
  double hbar = constants::hbar;
  double kB = constants::kB;
  double eps0 = constants::eps0;
};

} // namespace levitodyn
