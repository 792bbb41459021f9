#include "levitodyn/cooling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "levitodyn/gas.hpp"
#include "levitodyn/optics.hpp"

namespace levitodyn::cooling {

using constants::c;
using constants::hbar;
using constants::kB;
using constants::pi;

double coupling_torsional(const CoolingSetup& setup) {
  require_valid(setup.particle, setup.beam);
  require_valid(setup.cavity);
  const auto freq = optics::frequencies(setup.particle, setup.beam);
  if (freq.torsional_degenerate || freq.omega_theta <= 0.0)
    throw std::invalid_argument(
        "coupling_torsional: sphere has no torsional mode");
  const auto chi = optics::susceptibilities(setup.particle);
  const Particle& p = setup.particle;
  const double lc = setup.cavity.wavelength;
  const double length = setup.cavity.length;
  const double envelope =
      std::sqrt(10.0 * hbar * pi * p.rx * p.ry * p.ry /
                (3.0 * p.density * (p.rx * p.rx + p.ry * p.ry) *
                 freq.omega_theta));
  return envelope * (chi.chi_x - chi.chi_y) * 64.0 * pi * c /
         (lc * lc * length * length);
}

double coupling_com(const CoolingSetup& setup) {
  require_valid(setup.particle, setup.beam);
  require_valid(setup.cavity);
  const auto freq = optics::frequencies(setup.particle, setup.beam);
  if (!(freq.omega_y > 0.0))
    throw std::invalid_argument("coupling_com: no COM mode");
  const auto chi = optics::susceptibilities(setup.particle);
  const Particle& p = setup.particle;
  const double lc = setup.cavity.wavelength;
  const double length = setup.cavity.length;
  const double envelope = std::sqrt(
      2.0 * hbar * pi * p.rx * p.ry * p.ry / (3.0 * p.density * freq.omega_y));
  return envelope * chi.chi_x * 16.0 * pi * pi * c /
         (lc * lc * lc * length * length);
}

double optimal_detuning(double kappa, double omega) {
  return -std::sqrt(kappa * kappa / 4.0 + omega * omega);
}

double effective_detuning(double bare_detuning, double g, double n_photons,
                          double omega) {
  return bare_detuning + 2.0 * g * g * n_photons / omega;
}

PhononResult steady_phonons(const CoolingSetup& setup, double g, double omega,
                            double gamma_gas, double temperature) {
  if (!(omega > 0.0))
    throw std::invalid_argument("steady_phonons: omega must be > 0");
  if (gamma_gas < 0.0)
    throw std::invalid_argument("steady_phonons: gamma_gas must be >= 0");
  const double kappa = setup.cavity.decay_rate();

  PhononResult res;
  res.detuning = setup.laser_detuning
                     ? effective_detuning(*setup.laser_detuning, g,
                                          setup.drive_photons, omega)
                     : optimal_detuning(kappa, omega);
  res.coupling = g * std::sqrt(setup.drive_photons);
  res.strong_coupling_warning = res.coupling >= kappa / 2.0;
  res.n_th = kB * temperature / (hbar * omega);

  const double g2 = res.coupling * res.coupling;
  const auto rate = [&](double sideband) {
    const double det = res.detuning + sideband;
    return g2 * kappa / (kappa * kappa / 4.0 + det * det);
  };
  res.A_minus = rate(omega);
  res.A_plus = rate(-omega);
  res.gamma_opt = res.A_minus - res.A_plus;

  if (setup.drive_photons == 0.0 || g == 0.0) {
    // No optical rates at all: the gas bath sets the occupation.
    res.n_min = 0.0;
    res.n_ss = res.n_th;
    return res;
  }
  if (res.gamma_opt <= 0.0) {
    res.heating = true;
    res.n_min = std::numeric_limits<double>::infinity();
    res.n_ss = std::numeric_limits<double>::infinity();
    return res;
  }
  res.n_min = res.A_plus / res.gamma_opt;
  res.n_ss = (res.gamma_opt * res.n_min + gamma_gas * res.n_th) /
             (res.gamma_opt + gamma_gas);
  return res;
}

std::vector<CoolingSweepRow> cooling_sweep(const CoolingSetup& setup,
                                           const std::vector<double>& drives,
                                           const GasEnvironment& gas,
                                           double temperature) {
  const auto freq = optics::frequencies(setup.particle, setup.beam);
  const auto rates = gas::damping_rates(setup.particle, gas);
  const double g_th = coupling_torsional(setup);
  const double g_y = coupling_com(setup);

  std::vector<CoolingSweepRow> rows;
  rows.reserve(drives.size());
  for (double n_p : drives) {
    CoolingSetup point = setup;
    point.drive_photons = n_p;
    CoolingSweepRow row;
    row.n_photons = n_p;
    row.torsional = steady_phonons(point, g_th, freq.omega_theta,
                                   rates.gamma_theta, temperature);
    row.com =
        steady_phonons(point, g_y, freq.omega_y, rates.gamma_y, temperature);
    rows.push_back(row);
  }
  return rows;
}

} // namespace levitodyn::cooling
