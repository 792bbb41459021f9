#include "levitodyn/types.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace levitodyn {

double GasEnvironment::mean_speed() const {
  return std::sqrt(8.0 * constants::kB * temperature /
                   (constants::pi * molecular_mass));
}

double GasEnvironment::number_density() const {
  return pressure / (constants::kB * temperature);
}

double GasEnvironment::mean_free_path() const {
  const double d = constants::air_collision_diameter;
  return constants::kB * temperature /
         (std::sqrt(2.0) * constants::pi * d * d * pressure);
}

double Cavity::mode_waist() const {
  return std::sqrt(wavelength * length / (2.0 * constants::pi));
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

} // namespace

ValidationReport validate(const Particle& p) {
  ValidationReport report;
  auto& bad = report.violations;
  if (!(p.rx > 0.0 && p.ry > 0.0 && p.rz > 0.0))
    bad.push_back("particle: semiaxes must be positive");
  if (p.ry != p.rz)
    bad.push_back("particle: ry must equal rz (prolate spheroid), got ry=" +
                  num(p.ry) + " rz=" + num(p.rz));
  if (p.rx < p.ry)
    bad.push_back("particle: rx must be >= ry, got rx=" + num(p.rx) +
                  " ry=" + num(p.ry));
  if (!(p.density > 0.0)) bad.push_back("particle: density must be positive");
  if (!(p.eps_r > 1.0))
    bad.push_back("particle: eps_r must exceed 1 (dielectric), got " +
                  num(p.eps_r));
  return report;
}

ValidationReport validate(const Particle& p, const TrapBeam& beam) {
  ValidationReport report = validate(p);
  auto& bad = report.violations;
  if (!(beam.power > 0.0)) bad.push_back("beam: power must be positive");
  if (!(beam.waist > 0.0)) bad.push_back("beam: waist must be positive");
  if (!(beam.wavelength > 0.0))
    bad.push_back("beam: wavelength must be positive");

  const double rmax = std::max(p.rx, std::max(p.ry, p.rz));
  if (beam.wavelength > 0.0 && rmax >= beam.wavelength / 5.0)
    report.warnings.push_back(
        "Rayleigh approximation questionable: max semiaxis " + num(rmax) +
        " m is not small against wavelength " + num(beam.wavelength) + " m");
  return report;
}

ValidationReport validate(const GasEnvironment& gas) {
  ValidationReport report;
  if (gas.pressure < 0.0)
    report.violations.push_back("gas: pressure must be >= 0");
  if (!(gas.temperature > 0.0))
    report.violations.push_back("gas: temperature must be positive");
  if (!(gas.molecular_mass > 0.0))
    report.violations.push_back("gas: molecular_mass must be positive");
  if (gas.accommodation < 0.0 || gas.accommodation > 1.0)
    report.violations.push_back("gas: accommodation must be in [0, 1]");
  return report;
}

ValidationReport validate(const Cavity& cavity) {
  ValidationReport report;
  if (!(cavity.length > 0.0))
    report.violations.push_back("cavity: length must be positive");
  if (!(cavity.finesse > 1.0))
    report.violations.push_back("cavity: finesse must exceed 1");
  if (!(cavity.wavelength > 0.0))
    report.violations.push_back("cavity: wavelength must be positive");
  return report;
}

namespace {

[[noreturn]] void throw_report(const ValidationReport& report) {
  std::string msg = "invalid configuration:";
  for (const auto& v : report.violations) msg += "\n  " + v;
  throw std::invalid_argument(msg);
}

} // namespace

void require_valid(const Particle& particle, const TrapBeam& beam) {
  const auto report = validate(particle, beam);
  if (!report.valid()) throw_report(report);
}

void require_valid(const Particle& particle) {
  const auto report = validate(particle);
  if (!report.valid()) throw_report(report);
}

void require_valid(const GasEnvironment& gas) {
  const auto report = validate(gas);
  if (!report.valid()) throw_report(report);
}

void require_valid(const Cavity& cavity) {
  const auto report = validate(cavity);
  if (!report.valid()) throw_report(report);
}

} // namespace levitodyn
