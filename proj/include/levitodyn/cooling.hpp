#pragma once

#include <optional>
#include <vector>

#include "levitodyn/types.hpp"

// Cavity sideband cooling of the trapped modes. The particle sits at a
// cavity antinode; linearizing the dispersive interaction around the trap
// equilibrium gives single-photon coupling constants g (one per mode,
// evaluated at their maximizing geometry: polarization angle 45 degrees
// for the torsional mode, 0 for the COM mode). A red-detuned intracavity
// field of n_p photons then cools at rate A_minus and heats at A_plus,
//   A_[-+] = G^2 kappa / (kappa^2/4 + (Delta_L +- Omega)^2),  G = g sqrt(n_p)
// (weak coupling, G < kappa/2), and the steady phonon number balances the
// optical rates against gas reheating.

namespace levitodyn::cooling {

struct CoolingSetup {
  Cavity cavity;
  Particle particle;
  TrapBeam beam;          ///< trap that sets the mode frequencies
  double drive_photons = 0.0; ///< intracavity photon number n_p
  /// Bare laser detuning [rad/s]; when unset the detuning that maximizes
  /// the net cooling rate is used directly.
  std::optional<double> laser_detuning;
  double beta = constants::pi / 4.0; ///< trap-cavity polarization angle
};

/// Maximum torsional single-photon coupling g_theta [rad/s].
/// Throws std::invalid_argument for a sphere (no torsional mode).
double coupling_torsional(const CoolingSetup& setup);

/// Maximum COM single-photon coupling g_y [rad/s].
double coupling_com(const CoolingSetup& setup);

/// Detuning maximizing the sideband asymmetry: -sqrt(kappa^2/4 + Omega^2).
double optimal_detuning(double kappa, double omega);

/// Drive-dependent effective detuning: bare + 2 g^2 n_p / Omega.
double effective_detuning(double bare_detuning, double g, double n_photons,
                          double omega);

struct PhononResult {
  double n_ss = 0.0;      ///< steady-state phonon occupation
  double A_minus = 0.0;   ///< cooling rate [rad/s]
  double A_plus = 0.0;    ///< heating rate [rad/s]
  double gamma_opt = 0.0; ///< net optical damping A_minus - A_plus
  double n_min = 0.0;     ///< backaction limit A_plus/(A_minus - A_plus)
  double n_th = 0.0;      ///< gas-temperature occupation kB T/(hbar Omega)
  double detuning = 0.0;  ///< effective detuning used [rad/s]
  double coupling = 0.0;  ///< G = g sqrt(n_p) [rad/s]
  bool heating = false;   ///< A_minus <= A_plus: no steady state
  bool strong_coupling_warning = false; ///< G >= kappa/2
};

/// Steady phonon occupation of one mode with single-photon coupling g and
/// frequency omega [rad/s], reheated by the gas at rate gamma_gas from a
/// bath at `temperature`. Uses setup.laser_detuning (shifted to the
/// effective detuning) when present, the optimal detuning otherwise.
PhononResult steady_phonons(const CoolingSetup& setup, double g, double omega,
                            double gamma_gas, double temperature);

struct CoolingSweepRow {
  double n_photons = 0.0;
  PhononResult torsional;
  PhononResult com;
};

/// n_ss for both modes over a drive grid, with gas reheating computed from
/// the environment. Rows are independent; order follows `drives`.
std::vector<CoolingSweepRow> cooling_sweep(const CoolingSetup& setup,
                                           const std::vector<double>& drives,
                                           const GasEnvironment& gas,
                                           double temperature);

} // namespace levitodyn::cooling
