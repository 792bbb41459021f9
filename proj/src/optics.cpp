#include "levitodyn/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace levitodyn::optics {

using constants::c;
using constants::pi;

std::array<double, 3> depolarization_factors(double aspect) {
  if (!(aspect > 0.0) || aspect > 1.0)
    throw std::domain_error("depolarization_factors: aspect must be in (0,1]");

  const double e2 = 1.0 - aspect * aspect; // squared eccentricity
  if (e2 == 0.0) {
    // Exact sphere: all three factors identical, so downstream differences
    // (chi_x - chi_y) vanish exactly rather than to roundoff.
    const double third = 1.0 / 3.0;
    return {third, third, third};
  }
  double lx;
  if (e2 < 9.0e-4) {
    // Series in e^2 around the sphere; the closed form loses digits to
    // cancellation as e -> 0.
    lx = 1.0 / 3.0 -
         e2 * (2.0 / 15.0 +
               e2 * (2.0 / 35.0 + e2 * (2.0 / 63.0 + e2 * (2.0 / 99.0))));
  } else {
    const double e = std::sqrt(e2);
    lx = ((1.0 - e2) / e2) *
         (std::log((1.0 + e) / (1.0 - e)) / (2.0 * e) - 1.0);
  }
  const double lyz = 0.5 * (1.0 - lx);
  return {lx, lyz, lyz};
}

Susceptibility susceptibilities(const Particle& particle) {
  const auto L = depolarization_factors(particle.aspect());
  const double de = particle.eps_r - 1.0;
  Susceptibility s;
  s.L_x = L[0];
  s.L_y = L[1];
  s.L_z = L[2];
  s.chi_x = de / (1.0 + L[0] * de);
  s.chi_y = de / (1.0 + L[1] * de);
  return s;
}

double intensity(const TrapBeam& beam, double y) {
  const double w2 = beam.waist * beam.waist;
  return 2.0 * beam.power / (pi * w2) * std::exp(-2.0 * y * y / w2);
}

double potential(const Particle& particle, const TrapBeam& beam, double y,
                 double theta) {
  const auto s = susceptibilities(particle);
  const double st = std::sin(theta);
  const double chi_eff = s.chi_x - (s.chi_x - s.chi_y) * st * st;
  return -particle.volume() / (2.0 * c) * chi_eff * intensity(beam, y);
}

double restoring_torque(const Particle& particle, const TrapBeam& beam,
                        double y, double theta) {
  const auto s = susceptibilities(particle);
  return -particle.volume() / (2.0 * c) * (s.chi_x - s.chi_y) *
         std::sin(2.0 * theta) * intensity(beam, y);
}

double restoring_force(const Particle& particle, const TrapBeam& beam,
                       double y, double theta) {
  const auto s = susceptibilities(particle);
  const double st = std::sin(theta);
  const double chi_eff = s.chi_x - (s.chi_x - s.chi_y) * st * st;
  const double w2 = beam.waist * beam.waist;
  // dI/dy = -4 y/w^2 I(y)
  return -particle.volume() / (2.0 * c) * chi_eff * intensity(beam, y) *
         4.0 * y / w2;
}

TrapFrequencies frequencies(const Particle& particle, const TrapBeam& beam) {
  require_valid(particle, beam);
  const auto s = susceptibilities(particle);
  const double w2 = beam.waist * beam.waist;
  const double rho = particle.density;

  TrapFrequencies f;
  f.omega_y = std::sqrt(4.0 * s.chi_x * beam.power / (c * pi * rho * w2 * w2));
  const double dchi = s.chi_x - s.chi_y;
  if (dchi <= 0.0) {
    f.omega_theta = 0.0;
    f.torsional_degenerate = true;
  } else {
    const double r2 = particle.rx * particle.rx + particle.ry * particle.ry;
    f.omega_theta = std::sqrt(10.0 * dchi * beam.power / (c * pi * rho * w2 * r2));
  }
  return f;
}

double frequency_ratio(const Particle& particle, const TrapBeam& beam) {
  const auto s = susceptibilities(particle);
  const double r2 = particle.rx * particle.rx + particle.ry * particle.ry;
  return std::sqrt(10.0 * (s.chi_x - s.chi_y) / (4.0 * s.chi_x)) * beam.waist /
         std::sqrt(r2);
}

} // namespace levitodyn::optics
