#include "levitodyn/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "levitodyn/gas.hpp"
#include "levitodyn/optics.hpp"
#include "levitodyn/random.hpp"

namespace levitodyn::dynamics {

using constants::kB;
using constants::pi;

namespace {

/// Exact Ornstein-Uhlenbeck map over time h for velocity v with damping
/// gamma and stationary velocity variance s2 = kB T / mass:
/// v -> c v + sqrt((1-c^2) s2) xi.
struct OuMap {
  double c = 1.0;
  double noise = 0.0;
  OuMap() = default;
  OuMap(double gamma, double h, double s2) {
    c = std::exp(-gamma * h);
    noise = std::sqrt(std::max(0.0, (1.0 - c * c) * s2));
  }
  double apply(double v, rng::Stream& rs) const {
    return c * v + noise * rs.gauss();
  }
};

/// Exact free harmonic rotation over h (Omega may be zero: free flight).
inline void harmonic_step(double& x, double& v, double omega0, double h) {
  if (omega0 == 0.0) {
    x += v * h;
    return;
  }
  const double ct = std::cos(omega0 * h);
  const double st = std::sin(omega0 * h);
  const double x1 = x * ct + v / omega0 * st;
  const double v1 = -x * omega0 * st + v * ct;
  x = x1;
  v = v1;
}

} // namespace

double default_timestep(const Particle& particle, const TrapBeam& beam) {
  const auto freq = optics::frequencies(particle, beam);
  const double omega_max = std::max(freq.omega_y, freq.omega_theta);
  return (2.0 * pi / omega_max) / 50.0;
}

Trajectory simulate(const Particle& particle, const TrapBeam& beam,
                    const GasEnvironment& gas, double temperature, double dt,
                    std::uint64_t n_steps, std::uint64_t seed, Mode mode,
                    const std::optional<State>& initial) {
  require_valid(particle, beam);
  require_valid(gas);
  if (!(temperature > 0.0))
    throw std::invalid_argument("simulate: temperature must be positive");
  if (n_steps < 2) throw std::invalid_argument("simulate: n_steps must be >= 2");

  const auto freq = optics::frequencies(particle, beam);
  const double omega_max = std::max(freq.omega_y, freq.omega_theta);
  if (!(dt > 0.0) || dt >= 0.05 * (2.0 * pi / omega_max)) {
    std::ostringstream os;
    os << "simulate: dt = " << dt << " s does not resolve the "
       << (freq.omega_theta >= freq.omega_y ? "torsional" : "COM")
       << " mode at " << omega_max / (2.0 * pi)
       << " Hz; need dt < " << 0.05 * (2.0 * pi / omega_max) << " s";
    throw std::invalid_argument(os.str());
  }

  const auto rates = gas::damping_rates(particle, gas);
  const double mass = particle.mass();
  const double inertia = particle.moment_of_inertia();
  const double s2_v = kB * temperature / mass;    // <vy^2> at equilibrium
  const double s2_w = kB * temperature / inertia; // <omega^2>

  Trajectory traj;
  traj.dt = dt;
  traj.particle = particle;
  traj.beam = beam;
  traj.gas = gas;
  traj.temperature = temperature;
  traj.seed = seed;
  traj.mode = mode;
  traj.initial = initial;
  traj.omega_y = freq.omega_y;
  traj.omega_theta = freq.omega_theta;
  traj.gamma_y = rates.gamma_y;
  traj.gamma_theta = rates.gamma_theta;

  rng::Stream rs(seed);
  State st;
  if (initial) {
    st = *initial;
  } else {
    // Thermal-equilibrium draw of the (linearized) trap.
    st.vy = std::sqrt(s2_v) * rs.gauss();
    st.omega = std::sqrt(s2_w) * rs.gauss();
    st.y = freq.omega_y > 0.0 ? std::sqrt(s2_v) / freq.omega_y * rs.gauss()
                              : 0.0;
    st.theta = freq.omega_theta > 0.0
                   ? std::sqrt(s2_w) / freq.omega_theta * rs.gauss()
                   : 0.0;
  }

  const OuMap ou_y(rates.gamma_y, dt / 2.0, s2_v);
  const OuMap ou_th(rates.gamma_theta, dt / 2.0, s2_w);

  const std::size_t count = static_cast<std::size_t>(n_steps) + 1;
  traj.y.reserve(count);
  traj.vy.reserve(count);
  traj.theta.reserve(count);
  traj.omega.reserve(count);
  const auto record = [&](const State& s) {
    traj.y.push_back(s.y);
    traj.vy.push_back(s.vy);
    traj.theta.push_back(s.theta);
    traj.omega.push_back(s.omega);
  };
  record(st);

  for (std::uint64_t step = 0; step < n_steps; ++step) {
    // OU half-step (exact friction + noise).
    st.vy = ou_y.apply(st.vy, rs);
    st.omega = ou_th.apply(st.omega, rs);

    // Hamiltonian full step.
    if (mode == Mode::harmonic) {
      harmonic_step(st.y, st.vy, freq.omega_y, dt);
      harmonic_step(st.theta, st.omega, freq.omega_theta, dt);
    } else {
      // Velocity Verlet on the exact force/torque.
      double f = optics::restoring_force(particle, beam, st.y, st.theta);
      double m = optics::restoring_torque(particle, beam, st.y, st.theta);
      st.vy += 0.5 * dt * f / mass;
      st.omega += 0.5 * dt * m / inertia;
      st.y += dt * st.vy;
      st.theta += dt * st.omega;
      f = optics::restoring_force(particle, beam, st.y, st.theta);
      m = optics::restoring_torque(particle, beam, st.y, st.theta);
      st.vy += 0.5 * dt * f / mass;
      st.omega += 0.5 * dt * m / inertia;
    }

    // Second OU half-step.
    st.vy = ou_y.apply(st.vy, rs);
    st.omega = ou_th.apply(st.omega, rs);

    if (!(std::isfinite(st.y) && std::isfinite(st.vy) &&
          std::isfinite(st.theta) && std::isfinite(st.omega))) {
      std::ostringstream os;
      os << "simulate: non-finite state at step " << step + 1;
      throw std::runtime_error(os.str());
    }
    record(st);
  }
  return traj;
}

DetectorSignals detector_signals(const Trajectory& traj, double noise_floor,
                                 double gain_com, double gain_tor) {
  if (traj.size() < 2 || !(traj.dt > 0.0))
    throw std::invalid_argument("detector_signals: invalid trajectory");
  if (noise_floor < 0.0)
    throw std::invalid_argument("detector_signals: noise floor must be >= 0");

  DetectorSignals out;
  out.dt = traj.dt;
  out.gain_com = gain_com;
  out.gain_tor = gain_tor;
  out.noise_floor = noise_floor;

  // One-sided white PSD N0 across the Nyquist band 1/(2 dt) gives a
  // per-sample variance of N0/(2 dt).
  const double noise_std = std::sqrt(noise_floor / (2.0 * traj.dt));
  rng::Stream rs(rng::derive_seed(traj.seed, 0xde7ec7u));

  const std::size_t n = traj.size();
  out.com.resize(n);
  out.tor.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.com[i] = gain_com * traj.y[i] + noise_std * rs.gauss();
    out.tor[i] = gain_tor * 0.5 * std::sin(2.0 * traj.theta[i]) +
                 noise_std * rs.gauss();
  }
  return out;
}

} // namespace levitodyn::dynamics
