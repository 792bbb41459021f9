// Acceptance gate: eight end-to-end checks of the toolkit, one printed
// PASS/FAIL line each, exit status 0 only when all pass. Tolerances are
// pinned here, next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "levitodyn/constants.hpp"
#include "levitodyn/cooling.hpp"
#include "levitodyn/dynamics.hpp"
#include "levitodyn/gas.hpp"
#include "levitodyn/gas_mc.hpp"
#include "levitodyn/optics.hpp"
#include "levitodyn/random.hpp"
#include "levitodyn/sensing.hpp"
#include "levitodyn/spectral.hpp"
#include "levitodyn/types.hpp"
#include "oracles.hpp"

using namespace levitodyn;

namespace {

constexpr double two_pi = 2.0 * constants::pi;

const Particle kWide = Particle::diamond(50e-9, 40e-9);  // aspect 0.8
const Particle kThin = Particle::diamond(50e-9, 25e-9);  // aspect 0.5
const TrapBeam kBeam{0.1, 600e-9, 1550e-9};

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

int g_failures = 0;

void report(int index, const std::string& name, const Outcome& out,
            const std::string& extra = "") {
  std::cout << (out.ok ? "PASS" : "FAIL") << ": criterion " << index << " — "
            << name;
  if (!extra.empty()) std::cout << " [" << extra << "]";
  if (!out.ok) std::cout << " — " << out.detail.str();
  std::cout << "\n";
  if (!out.ok) ++g_failures;
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

/// Wall time per call of `fn`, averaged over `n` calls after a warmup.
template <typename Fn> double time_per_call(Fn fn, int n) {
  for (int i = 0; i < 16; ++i) fn();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < n; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / n;
}

// --- criterion 1: susceptibility worked example ---------------------------

void criterion_1() {
  Outcome out;
  const auto chi = optics::susceptibilities(kWide);
  out.require(within(chi.chi_x, 2.05, 0.01),
              "chi_x " + std::to_string(chi.chi_x) + " not within 1% of 2.05");
  out.require(within(chi.chi_y, 1.74, 0.01),
              "chi_y " + std::to_string(chi.chi_y) + " not within 1% of 1.74");

  volatile double sink = 0.0;
  const double per_call = time_per_call(
      [&] { sink = sink + optics::susceptibilities(kWide).chi_x; }, 1000);
  out.require(per_call < 1e-3, "runtime per call >= 1 ms");

  char buf[128];
  std::snprintf(buf, sizeof(buf), "chi=(%.4f, %.4f), %.1f ns/call",
                chi.chi_x, chi.chi_y, per_call * 1e9);
  report(1, "anisotropic susceptibility worked example", out, buf);
}

// --- criterion 2: mode frequencies for both geometries ---------------------

void criterion_2() {
  Outcome out;
  const auto f_wide = optics::frequencies(kWide, kBeam);
  const auto f_thin = optics::frequencies(kThin, kBeam);
  out.require(within(f_wide.omega_theta / two_pi, 1.26e6, 0.02),
              "wide torsional frequency off by more than 2%");
  out.require(within(f_wide.omega_y / two_pi, 220e3, 0.02),
              "wide COM frequency off by more than 2%");
  out.require(within(f_thin.omega_theta / two_pi, 2.6e6, 0.02),
              "thin torsional frequency off by more than 2%");
  out.require(within(f_thin.omega_y / two_pi, 248e3, 0.02),
              "thin COM frequency off by more than 2%");

  volatile double sink = 0.0;
  const double per_call = time_per_call(
      [&] { sink = sink + optics::frequencies(kWide, kBeam).omega_theta; },
      1000);
  out.require(per_call < 1e-3, "runtime per call >= 1 ms");

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "wide %.1f kHz / %.4f MHz, thin %.1f kHz / %.4f MHz",
                f_wide.omega_y / two_pi / 1e3,
                f_wide.omega_theta / two_pi / 1e6,
                f_thin.omega_y / two_pi / 1e3,
                f_thin.omega_theta / two_pi / 1e6);
  report(2, "trap frequencies for both reference geometries", out, buf);
}

// --- shared pipeline: simulate -> Welch PSD -> line fit --------------------

struct PipelineFit {
  double omega = 0.0, gamma = 0.0;
};

std::size_t next_pow2(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x && n < (1ull << 24)) n <<= 1;
  return n;
}

PipelineFit pipeline_torsional(const GasEnvironment& gas,
                               std::uint64_t seed) {
  const auto freq = optics::frequencies(kWide, kBeam);
  const auto rates = gas::damping_rates(kWide, gas);
  const double dt = dynamics::default_timestep(kWide, kBeam);
  const double linewidth_hz = rates.gamma_theta / two_pi;
  std::size_t seglen = next_pow2(4.0 / (linewidth_hz * dt));
  seglen = std::clamp<std::size_t>(seglen, 1u << 12, 1u << 19);
  const std::uint64_t steps = 6 * seglen;
  const auto traj = dynamics::simulate(kWide, kBeam, gas, gas.temperature,
                                       dt, steps, seed,
                                       dynamics::Mode::harmonic);
  const auto spec = spectral::welch_psd(traj.theta, dt, seglen, 0.5);
  const double f0 = freq.omega_theta / two_pi;
  const auto fit = spectral::fit_lorentzian(spec, {0.7 * f0, 1.3 * f0});
  return {fit.omega, fit.gamma};
}

// --- criterion 3: scaling laws ---------------------------------------------

void criterion_3() {
  Outcome out;
  // Exact sqrt(P) law of the closed-form frequencies.
  const auto ref = optics::frequencies(kWide, kBeam);
  const double base_y = ref.omega_y / std::sqrt(kBeam.power);
  const double base_th = ref.omega_theta / std::sqrt(kBeam.power);
  for (double power : {0.025, 0.05, 0.2, 0.4}) {
    TrapBeam beam = kBeam;
    beam.power = power;
    const auto f = optics::frequencies(kWide, beam);
    out.require(within(f.omega_y / std::sqrt(power), base_y, 1e-12),
                "omega_y/sqrt(P) drifts at P=" + std::to_string(power));
    out.require(within(f.omega_theta / std::sqrt(power), base_th, 1e-12),
                "omega_theta/sqrt(P) drifts at P=" + std::to_string(power));
  }

  // Torsional frequency through the full synthetic pipeline across three
  // decades of pressure: normalized standard deviation <= 0.03.
  std::vector<std::pair<double, double>> points;
  for (double torr_p : {1.0, 10.0, 100.0}) {
    GasEnvironment gas = GasEnvironment::air(torr_p * constants::torr, 300.0);
    const auto fit =
        pipeline_torsional(gas, rng::derive_seed(20240819, (unsigned)torr_p));
    points.emplace_back(gas.pressure, fit.omega);
  }
  const auto [mean, nstd] = spectral::pressure_independence(points);
  out.require(nstd <= 0.03,
              "normalized std " + std::to_string(nstd) + " > 0.03");
  out.require(within(mean / two_pi, ref.omega_theta / two_pi, 0.02),
              "pipeline mean frequency far from the model value");

  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "sqrt(P) exact; pipeline 1/10/100 Torr nstd=%.4f", nstd);
  report(3, "frequency scaling laws", out, buf);
}

// --- criterion 4: equipartition --------------------------------------------

void criterion_4() {
  Outcome out;
  struct Setting {
    double torr_p, temperature;
    std::uint64_t seed;
  };
  char buf[128];
  std::string extras;
  for (const Setting s : {Setting{100.0, 300.0, 101}, Setting{20.0, 350.0, 7}}) {
    const auto gas =
        GasEnvironment::air(s.torr_p * constants::torr, s.temperature);
    const auto freq = optics::frequencies(kWide, kBeam);
    const auto rates = gas::damping_rates(kWide, gas);
    const double dt = dynamics::default_timestep(kWide, kBeam);
    // >= 100 relaxation times of the slowest thermostat (use 400).
    const auto steps =
        static_cast<std::uint64_t>(400.0 / (rates.gamma_y * dt));
    const auto traj = dynamics::simulate(kWide, kBeam, gas, s.temperature,
                                         dt, steps, s.seed,
                                         dynamics::Mode::harmonic);
    const double kT = constants::kB * s.temperature;
    const auto check_var = [&](const std::vector<double>& series,
                               double expected, const char* label) {
      std::vector<double> sq(series.size() - series.size() / 10);
      for (std::size_t i = 0; i < sq.size(); ++i) {
        const double v = series[i + series.size() / 10];
        sq[i] = v * v;
      }
      const double var = oracle::mean(sq);
      const double err = oracle::block_stderr(sq, 32);
      const double dev = std::abs(var - expected) / err;
      std::snprintf(buf, sizeof(buf), "%s %.1f sigma", label, dev);
      extras += std::string(extras.empty() ? "" : ", ") + buf;
      out.require(dev <= 3.0, std::string(label) +
                                  " variance off by more than 3 sigma (" +
                                  std::to_string(dev) + ")");
    };
    check_var(traj.y, kT / (kWide.mass() * freq.omega_y * freq.omega_y),
              "y");
    check_var(traj.theta,
              kT / (kWide.moment_of_inertia() * freq.omega_theta *
                    freq.omega_theta),
              "theta");
  }
  report(4, "equipartition of the thermal state", out, extras);
}

// --- criterion 5: PSD round trip -------------------------------------------

void criterion_5() {
  Outcome out;
  // Injected damped-oscillator line over a 20 dB noise floor, disturbed by
  // 30-segment-average periodogram noise; median fit error over 20 seeds.
  const double f0 = 1.2636e6, gamma_hz = 9.0e3;
  const double omega0 = two_pi * f0, gamma0 = two_pi * gamma_hz;
  const double c_scale = 1e-12 * std::pow(omega0, 3);
  const double peak = c_scale / (gamma0 * omega0 * omega0);
  const double floor = peak / 100.0; // SNR = 20 dB

  std::vector<double> omega_err, gamma_err;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spectral::Spectrum spec;
    const std::size_t n = 1 << 14;
    const double f_max = 4e6;
    spec.freqs.resize(n);
    spec.psd.resize(n);
    rng::Stream stream(rng::derive_seed(555, seed));
    for (std::size_t i = 0; i < n; ++i) {
      const double f = f_max * static_cast<double>(i) / n;
      const double w = two_pi * f;
      const double d = omega0 * omega0 - w * w;
      double s = c_scale * gamma0 / (d * d + gamma0 * gamma0 * w * w) + floor;
      double m = 0.0;
      for (int j = 0; j < 15; ++j) m += -std::log(stream.uniform());
      spec.psd[i] = s * m / 15.0;
      spec.freqs[i] = f;
    }
    spec.dt = 1.0 / (2.0 * f_max);
    spec.segment_len = 2 * (n - 1);
    spec.segments = 15;
    spec.window = "hann";
    const auto fit = spectral::fit_lorentzian(spec, {0.9e6, 1.7e6});
    omega_err.push_back(std::abs(fit.omega - omega0) / omega0);
    gamma_err.push_back(std::abs(fit.gamma - gamma0) / gamma0);
  }
  std::sort(omega_err.begin(), omega_err.end());
  std::sort(gamma_err.begin(), gamma_err.end());
  const double med_omega =
      0.5 * (omega_err[9] + omega_err[10]); // median of 20
  const double med_gamma = 0.5 * (gamma_err[9] + gamma_err[10]);
  out.require(med_omega <= 0.01,
              "median frequency error " + std::to_string(med_omega) +
                  " > 1%");
  out.require(med_gamma <= 0.10,
              "median linewidth error " + std::to_string(med_gamma) +
                  " > 10%");
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "median dOmega=%.4f%%, dGamma=%.2f%% over 20 seeds",
                med_omega * 100.0, med_gamma * 100.0);
  report(5, "spectral line fit round trip at 20 dB SNR", out, buf);
}

// --- criterion 6: gas damping model ----------------------------------------

void criterion_6() {
  Outcome out;
  const auto gas_base = GasEnvironment::air(constants::torr, 300.0);
  char buf[64];
  std::string extras;
  for (double aspect : {1.0, 0.8, 0.5}) {
    for (double acc : {0.5, 0.9}) {
      Particle p = Particle::diamond(50e-9, aspect * 50e-9);
      GasEnvironment gas = gas_base;
      gas.accommodation = acc;
      const auto closed = gas::damping_rates(p, gas);
      gas::McOptions opt;
      opt.samples = 400000;
      opt.seed = 424242;
      const auto mc = gas::mc_damping_rates(p, gas, opt);
      const double worst = std::max(
          {std::abs(mc.gamma_x / closed.gamma_x - 1.0),
           std::abs(mc.gamma_y / closed.gamma_y - 1.0),
           std::abs(mc.gamma_theta / closed.gamma_theta - 1.0)});
      std::snprintf(buf, sizeof(buf), "a=%.1f s=%.1f: %.2f%%", aspect, acc,
                    worst * 100.0);
      extras += std::string(extras.empty() ? "" : ", ") + buf;
      out.require(worst <= 0.10,
                  "Monte-Carlo mismatch " + std::to_string(worst) + " at "
                  "aspect " + std::to_string(aspect));
    }
  }

  // Sphere limit against the classic drag formula.
  const auto sphere_rates =
      gas::damping_rates(Particle::diamond(50e-9, 50e-9), gas_base);
  const double epstein = gas::epstein_sphere_rate(50e-9, 3500.0, gas_base);
  out.require(within(sphere_rates.gamma_x, epstein, 0.02),
              "sphere limit misses the reference drag formula");

  // Translational anisotropy window and quality-factor ratio.
  const auto wide_rates = gas::damping_rates(kWide, gas_base);
  const double ratio = wide_rates.gamma_x / wide_rates.gamma_y;
  out.require(ratio > 0.6 && ratio < 0.9,
              "gamma_x/gamma_y = " + std::to_string(ratio) +
                  " outside (0.6, 0.9)");
  const auto q = gas::quality_factors(kWide, kBeam, gas_base);
  out.require(q.Q_theta / q.Q_y > 5.0 && q.Q_theta / q.Q_y < 15.0,
              "Q_theta/Q_y = " + std::to_string(q.Q_theta / q.Q_y) +
                  " outside (5, 15)");

  std::snprintf(buf, sizeof(buf), "; gx/gy=%.3f, Qt/Qy=%.2f", ratio,
                q.Q_theta / q.Q_y);
  report(6, "free-molecular damping model vs collision Monte Carlo", out,
         extras + buf);
}

// --- criterion 7: cavity cooling thresholds --------------------------------

void criterion_7() {
  Outcome out;
  const auto gas = GasEnvironment::air(1e-8 * constants::torr, 300.0);
  const auto freq = optics::frequencies(kThin, kBeam);

  const auto sweep_at = [&](double length) {
    Cavity cav{length, 1e5, 1540e-9};
    cooling::CoolingSetup setup{cav, kThin, kBeam, 0.0, std::nullopt,
                                constants::pi / 4.0};
    std::vector<double> drives;
    for (int i = 0; i <= 96; ++i)
      drives.push_back(std::pow(10.0, 4.0 + i * (12.0 - 4.0) / 96.0));
    return cooling::cooling_sweep(setup, drives, gas, 300.0);
  };

  // Short cavity: the torsional mode has a ground-state drive window, the
  // COM mode stays above one phonon throughout weak coupling.
  bool theta_ground = false, com_ground_weak = false;
  bool pointwise = true;
  for (const auto& row : sweep_at(0.5e-3)) {
    if (!row.torsional.strong_coupling_warning)
      theta_ground = theta_ground || row.torsional.n_ss < 1.0;
    if (!row.com.strong_coupling_warning)
      com_ground_weak = com_ground_weak || row.com.n_ss < 1.0;
    if (row.torsional.n_ss >= row.com.n_ss) pointwise = false;
  }
  out.require(theta_ground, "0.5 mm: torsional mode never reaches n < 1");
  out.require(!com_ground_weak,
              "0.5 mm: COM mode reaches n < 1 in weak coupling");
  out.require(pointwise, "torsional occupation not below COM pointwise");

  // Long cavity: both modes reach the ground state.
  bool theta_ground_l = false, com_ground_l = false;
  for (const auto& row : sweep_at(5e-3)) {
    theta_ground_l = theta_ground_l || row.torsional.n_ss < 1.0;
    com_ground_l = com_ground_l || row.com.n_ss < 1.0;
  }
  out.require(theta_ground_l, "5 mm: torsional mode never reaches n < 1");
  out.require(com_ground_l, "5 mm: COM mode never reaches n < 1");

  // Couplings: exact 1/L^2 law and extended-precision agreement.
  const auto chi = optics::susceptibilities(kThin);
  double ref_product = 0.0;
  double worst_law = 0.0, worst_ld = 0.0;
  for (double length : {0.5e-3, 1e-3, 2e-3, 5e-3}) {
    Cavity cav{length, 1e5, 1540e-9};
    cooling::CoolingSetup setup{cav, kThin, kBeam, 0.0, std::nullopt,
                                constants::pi / 4.0};
    const double g_th = cooling::coupling_torsional(setup);
    const double g_y = cooling::coupling_com(setup);
    const double product = g_th * length * length;
    if (ref_product == 0.0) ref_product = product;
    worst_law = std::max(worst_law,
                         std::abs(product / ref_product - 1.0));
    const auto g_th_ref = static_cast<double>(oracle::coupling_torsional_ld(
        kThin.rx, kThin.ry, kThin.density, chi.chi_x, chi.chi_y,
        freq.omega_theta, cav.wavelength, cav.length));
    const auto g_y_ref = static_cast<double>(oracle::coupling_com_ld(
        kThin.rx, kThin.ry, kThin.density, chi.chi_x, freq.omega_y,
        cav.wavelength, cav.length));
    worst_ld = std::max({worst_ld, std::abs(g_th / g_th_ref - 1.0),
                         std::abs(g_y / g_y_ref - 1.0)});
  }
  out.require(worst_law <= 1e-12,
              "g L^2 varies by " + std::to_string(worst_law));
  out.require(worst_ld <= 1e-9,
              "extended-precision mismatch " + std::to_string(worst_ld));

  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "gL^2 spread %.1e, long-double match %.1e", worst_law,
                worst_ld);
  report(7, "sideband-cooling mode selectivity and couplings", out, buf);
}

// --- criterion 8: torque sensitivity ---------------------------------------

void criterion_8() {
  Outcome out;
  const auto gas = GasEnvironment::air(1e-8 * constants::torr, 300.0);
  const auto freq = optics::frequencies(kWide, kBeam);
  const auto q = gas::quality_factors(kWide, kBeam, gas);
  const auto sens = sensing::torque_sensitivity(
      300.0, kWide.moment_of_inertia(), freq.omega_theta, q.Q_theta);
  out.require(sens.M_min_per_rtHz >= 1e-29 && sens.M_min_per_rtHz <= 4e-29,
              "M_min " + std::to_string(sens.M_min_per_rtHz) +
                  " not within a factor 2 of 2e-29");

  const double proton =
      sensing::spin_torque(constants::proton_magnetic_moment, 0.1);
  out.require(within(proton, 1.41e-27, 0.01),
              "proton spin torque differs from 1.41e-27");
  out.require(proton >= 1e-27 && proton < 1e-26, "not of order 1e-27");

  char buf[96];
  std::snprintf(buf, sizeof(buf), "M_min=%.3e N m/rtHz, proton=%.3e N m",
                sens.M_min_per_rtHz, proton);
  report(8, "torque sensitivity at ultra-high vacuum", out, buf);
}

} // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures == 0) {
    std::cout << "All 8 acceptance criteria passed.\n";
    return 0;
  }
  std::cout << g_failures << " acceptance criteria FAILED.\n";
  return 1;
}
