#include "levitodyn/sensing.hpp"

#include <stdexcept>

#include "levitodyn/constants.hpp"

namespace levitodyn::sensing {

SensitivityResult torque_sensitivity(double temperature, double inertia,
                                     double omega_theta, double q_theta) {
  if (!(temperature >= 0.0 && inertia > 0.0 && omega_theta > 0.0 &&
        q_theta > 0.0))
    throw std::invalid_argument(
        "torque_sensitivity: inputs must be positive (temperature >= 0)");
  SensitivityResult res;
  res.M_min_per_rtHz = std::sqrt(4.0 * constants::kB * temperature * inertia *
                                 omega_theta / q_theta);
  return res;
}

double spin_torque(double moment, double field) {
  if (field < 0.0)
    throw std::invalid_argument("spin_torque: field must be >= 0");
  return moment * field;
}

} // namespace levitodyn::sensing
