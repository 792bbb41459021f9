#pragma once

#include <utility>

#include "levitodyn/types.hpp"

// Free-molecular-regime gas damping of a prolate spheroid.
//
// Model: every surface element acts as a flat plate in free-molecular flow.
// Linearizing the plate loads in the (small) body speed gives drag pressures
//   normal:     mu * cn * u_n,   cn = 1 - sigma (1/2 - pi/8)
//   tangential: mu * ct * u_t,   ct = sigma / 4
// with mu = n m_gas v_mean the gas momentum-flux scale and sigma the
// accommodation coefficient (fraction of collisions reflected diffusely at
// the gas temperature; the 1-sigma remainder reflects specularly).
// Integrating the element loads over the spheroid surface yields the
// translational and rotational damping rates. For a sphere the result
// collapses to the Epstein rate (8/pi) p/(rho r v_mean) (1 + sigma pi/8).
//
// Rates are momentum damping coefficients: m dv/dt = -m gamma v, so gamma
// is exactly the Lorentzian linewidth entering the thermal PSD
// denominator ((Omega^2-w^2)^2 + gamma^2 w^2).

namespace levitodyn::gas {

/// Geometric load integrals over the spheroid surface (semiaxes rx >= ry):
/// the ingredients of the damping rates, exposed for cross-checking.
struct SurfaceLoads {
  double area = 0.0; ///< total surface area [m^2]
  double S_nx = 0.0; ///< integral of n_x^2 dA [m^2]
  double S_ny = 0.0; ///< integral of n_y^2 dA [m^2]
  double R_n = 0.0;  ///< integral of (x n_y - y n_x)^2 dA [m^4]
  double R_g = 0.0;  ///< integral of (x^2 + y^2) dA [m^4]
};

SurfaceLoads surface_loads(const Particle& particle);

struct DampingRates {
  double gamma_x = 0.0;     ///< COM damping along the long axis [rad/s]
  double gamma_y = 0.0;     ///< COM damping along a short axis [rad/s]
  double gamma_theta = 0.0; ///< torsional damping about z [rad/s]
  bool ballistic = false;   ///< p == 0: collisionless, all rates vanish
  /// Mean free path is not large against the particle: the free-molecular
  /// assumption is getting marginal (set when mfp < 10 x long semiaxis).
  bool knudsen_warning = false;
};

/// All damping rates of the spheroid in the given gas.
DampingRates damping_rates(const Particle& particle,
                           const GasEnvironment& gas);

/// Translational rates only, (gamma_x, gamma_y).
std::pair<double, double> com_damping(const Particle& particle,
                                      const GasEnvironment& gas);

/// Torsional rate only.
double rot_damping(const Particle& particle, const GasEnvironment& gas);

/// Epstein drag rate of a sphere of radius r: the exact sphere limit of
/// damping_rates().gamma_x, kept as an independent reference formula.
double epstein_sphere_rate(double radius, double density,
                           const GasEnvironment& gas);

struct QualityFactors {
  double Q_y = 0.0;
  double Q_theta = 0.0;
  bool unbounded = false;            ///< p == 0: no damping, Q diverges
  bool torsional_degenerate = false; ///< sphere: no torsional mode
};

/// Q = Omega/gamma for both modes, combining the trap frequencies with the
/// damping rates above.
QualityFactors quality_factors(const Particle& particle, const TrapBeam& beam,
                               const GasEnvironment& gas);

} // namespace levitodyn::gas
