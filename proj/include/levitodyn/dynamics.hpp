#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "levitodyn/types.hpp"

// Langevin dynamics of the two trapped degrees of freedom: the transverse
// center-of-mass coordinate y and the torsion angle theta,
//   m y''     = F_y     - m gamma_y  y'     + xi_y(t)
//   I theta'' = M_z     - I gamma_th theta' + xi_th(t)
// with white Gaussian noises satisfying fluctuation-dissipation,
// S_xi = 2 m gamma kB T (two-sided). Damping rates come from the gas
// module, forces from the optics module.
//
// Integrator: Strang splitting. Each step is a half-step of the exact
// Ornstein-Uhlenbeck friction/noise map, a full Hamiltonian step, and a
// second OU half-step. In `harmonic` mode the Hamiltonian step is the
// exact oscillator rotation, so both substeps preserve the Gibbs
// distribution and the sampled thermal state carries no timestep bias at
// any stable dt. In `full_potential` mode the Hamiltonian step is velocity
// Verlet on the exact force/torque.

namespace levitodyn::dynamics {

enum class Mode { harmonic, full_potential };

/// Phase-space point of the reduced two-mode system.
struct State {
  double y = 0.0;     ///< [m]
  double vy = 0.0;    ///< [m/s]
  double theta = 0.0; ///< [rad]
  double omega = 0.0; ///< [rad/s]
};

/// Uniformly sampled trajectory plus everything needed to reproduce it.
struct Trajectory {
  double dt = 0.0; ///< sampling interval [s]
  std::vector<double> y, vy, theta, omega; ///< n_steps+1 samples each

  // Metadata: the complete input configuration.
  Particle particle;
  TrapBeam beam;
  GasEnvironment gas;
  double temperature = 0.0; ///< thermostat temperature [K]
  std::uint64_t seed = 0;
  Mode mode = Mode::harmonic;
  std::optional<State> initial; ///< explicit start; otherwise thermal draw

  // Derived rates recorded for convenience (pure functions of the above).
  double omega_y = 0.0, omega_theta = 0.0;   ///< [rad/s]
  double gamma_y = 0.0, gamma_theta = 0.0;   ///< [rad/s]

  std::size_t size() const { return y.size(); }
  double duration() const { return dt * static_cast<double>(size() - 1); }
};

/// Integrate `n_steps` steps from either a thermal-equilibrium draw or the
/// given initial state. The trajectory stores n_steps+1 samples including
/// the initial one. Throws std::invalid_argument when dt fails the
/// resolution guard dt < 0.05 (2 pi / Omega_max), naming the limiting
/// mode; throws std::runtime_error with the step index if the state ever
/// turns non-finite.
Trajectory simulate(const Particle& particle, const TrapBeam& beam,
                    const GasEnvironment& gas, double temperature, double dt,
                    std::uint64_t n_steps, std::uint64_t seed, Mode mode,
                    const std::optional<State>& initial = std::nullopt);

/// Default timestep: the fastest mode's period divided by 50.
double default_timestep(const Particle& particle, const TrapBeam& beam);

/// Simulated detector outputs: a position-sensitive COM channel and a
/// balanced-polarimeter torsion channel,
///   com = gain_com * y + noise,   tor = gain_tor * sin(2 theta)/2 + noise,
/// each with independent white Gaussian noise of one-sided PSD
/// `noise_floor` (signal^2/Hz), i.e. per-sample variance N0/(2 dt).
struct DetectorSignals {
  std::vector<double> com, tor;
  double dt = 0.0;
  double gain_com = 1.0, gain_tor = 1.0;
  double noise_floor = 0.0;
};

DetectorSignals detector_signals(const Trajectory& traj, double noise_floor,
                                 double gain_com = 1.0, double gain_tor = 1.0);

} // namespace levitodyn::dynamics
