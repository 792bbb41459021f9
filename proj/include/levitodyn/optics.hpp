#pragma once

#include <array>

#include "levitodyn/types.hpp"

// Rayleigh-regime optics of a prolate spheroid in a linearly polarized
// Gaussian trap: anisotropic polarizability, optical potential, restoring
// force/torque and the resulting trap frequencies.
//
// Coordinates: y is the transverse center-of-mass coordinate in the focal
// plane, theta the angle between the particle long axis and the beam
// polarization. The beam is evaluated in its focal plane; axial intensity
// variation is not modeled.

namespace levitodyn::optics {

/// Effective susceptibilities chi_i = (eps_r-1)/(1+L_i(eps_r-1)) along the
/// particle principal axes, with the prolate-spheroid depolarization
/// factors L_i. Polarizabilities follow as alpha_i = eps0 V chi_i.
struct Susceptibility {
  double chi_x = 0.0;
  double chi_y = 0.0;
  double L_x = 0.0;
  double L_y = 0.0;
  double L_z = 0.0;
};

/// Depolarization factors (L_x, L_y, L_z) of a prolate spheroid with
/// transverse-to-long axis ratio `aspect` = ry/rx in (0, 1].
/// L_x + L_y + L_z == 1 exactly; aspect 1 gives (1/3, 1/3, 1/3).
/// Throws std::domain_error outside (0, 1].
std::array<double, 3> depolarization_factors(double aspect);

Susceptibility susceptibilities(const Particle& particle);

/// Focal-plane Gaussian intensity I(y) = 2P/(pi w^2) exp(-2 y^2/w^2) [W/m^2].
double intensity(const TrapBeam& beam, double y);

/// Optical potential U(y, theta) [J].
double potential(const Particle& particle, const TrapBeam& beam, double y,
                 double theta);

/// Restoring torque about z: M_z = -dU/dtheta [N m].
double restoring_torque(const Particle& particle, const TrapBeam& beam,
                        double y, double theta);

/// Restoring force along y: F_y = -dU/dy [N].
double restoring_force(const Particle& particle, const TrapBeam& beam,
                       double y, double theta);

/// Small-oscillation angular frequencies of the COM (y) and torsional
/// (theta) modes [rad/s]. A sphere has no torsional mode; it is reported
/// with omega_theta == 0 and `torsional_degenerate` set rather than as an
/// error.
struct TrapFrequencies {
  double omega_y = 0.0;
  double omega_theta = 0.0;
  bool torsional_degenerate = false;
};

TrapFrequencies frequencies(const Particle& particle, const TrapBeam& beam);

/// Closed-form ratio omega_theta/omega_y =
/// sqrt(10 (chi_x-chi_y)/(4 chi_x)) * w / sqrt(rx^2+ry^2).
double frequency_ratio(const Particle& particle, const TrapBeam& beam);

} // namespace levitodyn::optics
