#pragma once

#include <cmath>

// Thermal-noise-limited torque sensing with the torsional mode as a
// torsion balance: the minimum detectable torque over an averaging time
// Delta_t is set by the fluctuation-dissipation torque noise of the gas,
//   M_min = sqrt(4 kB T I Omega_theta / (Q_theta Delta_t)),
// reported per sqrt(Hz) by fixing Delta_t = 1 s.

namespace levitodyn::sensing {

struct SensitivityResult {
  double M_min_per_rtHz = 0.0; ///< [N m / sqrt(Hz)]

  /// Minimum detectable torque after averaging for `delta_t` seconds.
  double min_torque(double delta_t) const {
    return M_min_per_rtHz / std::sqrt(delta_t);
  }
};

/// Thermal torque noise floor of a torsion balance with moment of inertia
/// `inertia`, resonance `omega_theta` [rad/s] and quality factor `q_theta`
/// at temperature T. All inputs must be positive.
SensitivityResult torque_sensitivity(double temperature, double inertia,
                                     double omega_theta, double q_theta);

/// Maximum torque a magnetic moment [J/T] experiences in a field B [T].
double spin_torque(double moment, double field);

} // namespace levitodyn::sensing
