#pragma once

#include <string>
#include <vector>

#include "levitodyn/constants.hpp"

// Core domain types. All types are immutable-by-convention aggregates:
// construct, then share freely across threads. Derived quantities are pure
// functions of the fields.

namespace levitodyn {

/// Prolate spheroid with semiaxes rx >= ry == rz, uniform density and a
/// scalar relative permittivity.
struct Particle {
  double rx = 0.0;      ///< long semiaxis [m]
  double ry = 0.0;      ///< transverse semiaxis [m]
  double rz = 0.0;      ///< transverse semiaxis [m], equal to ry
  double density = 0.0; ///< mass density [kg/m^3]
  double eps_r = 0.0;   ///< relative permittivity

  double volume() const { return 4.0 * constants::pi / 3.0 * rx * ry * rz; }
  double mass() const { return density * volume(); }
  /// Moment of inertia about the z axis (uniform ellipsoid): m(rx^2+ry^2)/5.
  double moment_of_inertia() const {
    return mass() * (rx * rx + ry * ry) / 5.0;
  }
  double aspect() const { return ry / rx; }

  /// Diamond defaults: density 3500 kg/m^3, eps_r 5.71 (n ~ 2.39 at 1550 nm).
  static Particle diamond(double rx, double ryz) {
    return Particle{rx, ryz, ryz, 3500.0, 5.71};
  }
};

/// Linearly polarized Gaussian trap beam, described in its focal plane.
struct TrapBeam {
  double power = 0.0;      ///< optical power [W]
  double waist = 0.0;      ///< beam waist [m]
  double wavelength = 0.0; ///< [m]
};

/// Residual gas: free-molecular-regime parameters.
struct GasEnvironment {
  double pressure = 0.0;       ///< [Pa]
  double temperature = 0.0;    ///< [K]
  double molecular_mass = 0.0; ///< [kg]
  double accommodation = 0.0;  ///< diffuse fraction, 0..1

  /// Mean thermal speed sqrt(8 kB T / (pi m)) [m/s].
  double mean_speed() const;
  /// Number density p/(kB T) [1/m^3].
  double number_density() const;
  /// Mean free path estimate (air-like collision diameter) [m].
  double mean_free_path() const;

  /// Air at the given pressure and temperature, accommodation 0.9.
  static GasEnvironment air(double pressure_pa, double temperature_k) {
    return GasEnvironment{pressure_pa, temperature_k,
                          constants::air_molecular_mass, 0.9};
  }
};

/// Two-mirror Fabry-Perot cavity.
struct Cavity {
  double length = 0.0;     ///< [m]
  double finesse = 0.0;    ///< dimensionless
  double wavelength = 0.0; ///< resonance wavelength [m]

  /// Angular full-width decay rate kappa = pi c / (L F) [rad/s].
  double decay_rate() const {
    return constants::pi * constants::c / (length * finesse);
  }
  /// Confocal mode waist sqrt(lambda L / 2pi) [m].
  double mode_waist() const;
};

/// Report-only validation outcome: empty `violations` means valid;
/// `warnings` flag questionable-but-allowed regimes.
struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool valid() const { return violations.empty(); }
};

/// Check particle and beam invariants. Reports a warning when the particle
/// is too large for the point-dipole treatment (max semiaxis >= lambda/5).
ValidationReport validate(const Particle& particle, const TrapBeam& beam);

ValidationReport validate(const Particle& particle);
ValidationReport validate(const GasEnvironment& gas);
ValidationReport validate(const Cavity& cavity);

/// Throw std::invalid_argument listing all violations if invalid.
void require_valid(const Particle& particle, const TrapBeam& beam);
void require_valid(const Particle& particle);
void require_valid(const GasEnvironment& gas);
void require_valid(const Cavity& cavity);

} // namespace levitodyn
