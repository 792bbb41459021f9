#include "levitodyn/gas.hpp"

#include <cmath>
#include <limits>

#include <gsl/gsl_integration.h>

#include "levitodyn/optics.hpp"

namespace levitodyn::gas {

using constants::pi;

SurfaceLoads surface_loads(const Particle& particle) {
  require_valid(particle);
  const double a = particle.rx;
  const double b = particle.ry;

  // Parametrize the surface by t = x/a in [-1,1] and the azimuth about x.
  // With q(t) = t^2/a^2 + (1-t^2)/b^2 the area element is
  // dA = a b^2 sqrt(q) dt dphi and the unit normal is
  // (t/a, ...)/sqrt(q). The azimuthal integral is done analytically;
  // the remaining 1D integrands are smooth, so fixed-order Gauss-Legendre
  // reaches machine precision.
  static gsl_integration_glfixed_table* table =
      gsl_integration_glfixed_table_alloc(64);

  const double shear = (a / b - b / a);
  SurfaceLoads out;
  for (std::size_t i = 0; i < 64; ++i) {
    double t, w;
    gsl_integration_glfixed_point(-1.0, 1.0, i, &t, &w, table);
    const double t2 = t * t;
    const double s2 = 1.0 - t2;
    const double q = t2 / (a * a) + s2 / (b * b);
    const double J = a * b * b * std::sqrt(q);
    out.area += w * J;
    out.S_nx += w * (t2 / (a * a)) / q * J;
    out.R_n += w * t2 * s2 * shear * shear / (2.0 * q) * J;
    out.R_g += w * (a * a * t2 + b * b * s2 / 2.0) * J;
  }
  out.area *= 2.0 * pi;
  out.S_nx *= 2.0 * pi;
  out.R_n *= 2.0 * pi;
  out.R_g *= 2.0 * pi;
  // n_x^2 + n_y^2 + n_z^2 = 1 and y/z symmetry fix S_ny without quadrature.
  out.S_ny = 0.5 * (out.area - out.S_nx);
  return out;
}

namespace {

struct PlateCoefficients {
  double mu; ///< n m_gas v_mean [kg/(m^2 s)]
  double cn; ///< normal drag coefficient
  double ct; ///< tangential drag coefficient
};

PlateCoefficients plate_coefficients(const GasEnvironment& gas) {
  PlateCoefficients pc;
  pc.mu = gas.number_density() * gas.molecular_mass * gas.mean_speed();
  pc.cn = 1.0 - gas.accommodation * (0.5 - pi / 8.0);
  pc.ct = gas.accommodation / 4.0;
  return pc;
}

} // namespace

DampingRates damping_rates(const Particle& particle,
                           const GasEnvironment& gas) {
  require_valid(particle);
  require_valid(gas);

  DampingRates rates;
  if (gas.pressure == 0.0) {
    rates.ballistic = true;
    return rates;
  }
  rates.knudsen_warning = gas.mean_free_path() < 10.0 * particle.rx;

  const auto loads = surface_loads(particle);
  const auto pc = plate_coefficients(gas);
  const double mass = particle.mass();
  const double inertia = particle.moment_of_inertia();

  // Translation: force = -mu [cn (n.n) + ct (1 - n.n)] dA . u
  rates.gamma_x =
      pc.mu * (pc.cn * loads.S_nx + pc.ct * (loads.area - loads.S_nx)) / mass;
  rates.gamma_y =
      pc.mu * (pc.cn * loads.S_ny + pc.ct * (loads.area - loads.S_ny)) / mass;
  // Rotation about z: normal load couples through (x n_y - y n_x)^2,
  // tangential through the rest of the (x^2+y^2) moment.
  rates.gamma_theta =
      pc.mu * (pc.cn * loads.R_n + pc.ct * (loads.R_g - loads.R_n)) / inertia;
  return rates;
}

std::pair<double, double> com_damping(const Particle& particle,
                                      const GasEnvironment& gas) {
  const auto rates = damping_rates(particle, gas);
  return {rates.gamma_x, rates.gamma_y};
}

double rot_damping(const Particle& particle, const GasEnvironment& gas) {
  return damping_rates(particle, gas).gamma_theta;
}

double epstein_sphere_rate(double radius, double density,
                           const GasEnvironment& gas) {
  return (8.0 / pi) * gas.pressure /
         (density * radius * gas.mean_speed()) *
         (1.0 + gas.accommodation * pi / 8.0);
}

QualityFactors quality_factors(const Particle& particle, const TrapBeam& beam,
                               const GasEnvironment& gas) {
  const auto freq = optics::frequencies(particle, beam);
  const auto rates = damping_rates(particle, gas);

  QualityFactors q;
  q.torsional_degenerate = freq.torsional_degenerate;
  if (rates.ballistic) {
    q.unbounded = true;
    q.Q_y = std::numeric_limits<double>::infinity();
    q.Q_theta = q.torsional_degenerate
                    ? std::numeric_limits<double>::quiet_NaN()
                    : std::numeric_limits<double>::infinity();
    return q;
  }
  q.Q_y = freq.omega_y / rates.gamma_y;
  q.Q_theta = q.torsional_degenerate
                  ? std::numeric_limits<double>::quiet_NaN()
                  : freq.omega_theta / rates.gamma_theta;
  return q;
}

} // namespace levitodyn::gas
