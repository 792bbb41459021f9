// levitodyn: command-line front end for the levitated-spheroid toolkit.
// Subcommands cover single calculations (chi, freqs, damping, cool,
// torque), time-domain simulation plus spectral analysis (simulate, psd,
// fit), deterministic parameter sweeps, and the bundled reference figure
// datasets (figures). All file outputs are RFC-4180 CSV with 10
// significant digits; every file-writing run leaves a manifest with
// content digests so results are traceable and reproducible.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levitodyn/config_io.hpp"
#include "levitodyn/constants.hpp"
#include "levitodyn/cooling.hpp"
#include "levitodyn/dynamics.hpp"
#include "levitodyn/gas.hpp"
#include "levitodyn/optics.hpp"
#include "levitodyn/random.hpp"
#include "levitodyn/sensing.hpp"
#include "levitodyn/spectral.hpp"
#include "levitodyn/types.hpp"
#include "levitodyn/version.hpp"

namespace {

using json = nlohmann::json;
using namespace levitodyn;

constexpr double two_pi = 2.0 * constants::pi;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  bool json_out = false;
  std::string command_line;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config_path, "JSON configuration file")
      ->envname("LEVITODYN_CONFIG");
  sub->add_option("--out", opts.out_path, "output file path");
  sub->add_option("--seed", opts.seed, "master RNG seed");
  sub->add_option("--jobs", opts.jobs, "worker threads for grid evaluation")
      ->check(CLI::Range(1u, 256u));
  sub->add_flag("--json", opts.json_out, "machine-readable JSON on stdout");
}

/// Built-in defaults: the reference trap of the bundled configs
/// (see configs/). A prolate diamond spheroid in a 100 mW, 600 nm waist
/// tweezer at 1550 nm, residual air at 1e-8 Torr.
config::Config builtin_config(bool small_particle) {
  config::Config cfg;
  cfg.particle = small_particle ? Particle::diamond(50e-9, 25e-9)
                                : Particle::diamond(50e-9, 40e-9);
  cfg.beam = TrapBeam{0.1, 600e-9, 1550e-9};
  cfg.gas = GasEnvironment::air(1e-8 * constants::torr, 300.0);
  if (small_particle) cfg.cavity = Cavity{0.5e-3, 1e5, 1540e-9};
  return cfg;
}

config::Config resolve_config(const CommonOpts& opts,
                              bool prefer_cavity_defaults = false) {
  if (!opts.config_path.empty()) return config::load_config(opts.config_path);
  return builtin_config(prefer_cavity_defaults);
}

/// Parse "start:stop:count[:log]" into a grid. count == 1 gives {start}.
std::vector<double> parse_grid(const std::string& text, bool force_log) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  bool log = force_log;
  if (parts.size() == 4 && parts[3] == "log") {
    log = true;
    parts.pop_back();
  }
  if (parts.size() != 3)
    throw std::invalid_argument("grid \"" + text +
                                "\" must look like start:stop:count[:log]");
  const double lo = std::stod(parts[0]);
  const double hi = std::stod(parts[1]);
  const long count = std::stol(parts[2]);
  if (count < 1 || count > 100000000)
    throw std::invalid_argument("grid count out of range in \"" + text + "\"");
  if (log && !(lo > 0.0 && hi > 0.0))
    throw std::invalid_argument("log grid needs positive endpoints");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  for (long i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    grid[static_cast<std::size_t>(i)] =
        log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
  }
  return grid;
}

/// Evaluate fn(0..count-1) on `jobs` threads. Results must be stored by
/// index by the callable, which keeps outputs independent of scheduling.
void run_parallel(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  jobs = static_cast<unsigned>(
      std::min<std::size_t>(jobs == 0 ? 1 : jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void emit_manifest(const CommonOpts& opts, const config::Config* cfg,
                   const std::vector<std::string>& files) {
  if (opts.out_path.empty() || files.empty()) return;
  config::RunManifest manifest;
  manifest.tool_version = levitodyn::version;
  manifest.command_line = opts.command_line;
  manifest.seed = opts.seed;
  if (cfg) manifest.config_json = config::config_to_json(*cfg);
  for (const auto& f : files) {
    config::RunManifest::Output o;
    o.path = f;
    o.fnv1a = config::fnv1a_file_hex(f);
    std::ifstream in(f, std::ios::binary | std::ios::ate);
    o.bytes = in ? static_cast<std::uint64_t>(in.tellg()) : 0;
    manifest.outputs.push_back(o);
  }
  config::write_manifest(opts.out_path + ".manifest.json", manifest);
}

void print_summary(const CommonOpts& opts, const json& summary) {
  if (opts.json_out) {
    std::cout << summary.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : summary.items())
    std::cout << key << ": " << value.dump() << "\n";
}

std::string csv_sibling(const std::string& base, const std::string& tag) {
  const auto dot = base.rfind('.');
  if (dot == std::string::npos) return base + tag;
  return base.substr(0, dot) + tag + base.substr(dot);
}

// ---------------------------------------------------------------------------
// CSV input (for psd/fit): header row + numeric rows, comma separated.

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == '\n'))
      cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns; ///< column-major

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return columns[i];
    std::string known;
    for (const auto& h : header) known += (known.empty() ? "" : ", ") + h;
    throw std::invalid_argument("csv: no column \"" + name +
                                "\" (columns: " + known + ")");
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot read \"" + path + "\"");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("csv: empty file \"" + path + "\"");
  table.header = split_csv_line(line);
  table.columns.resize(table.header.size());
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw std::runtime_error("csv: ragged row in \"" + path + "\"");
    for (std::size_t i = 0; i < cells.size(); ++i)
      table.columns[i].push_back(std::stod(cells[i]));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Shared simulate -> PSD -> line-fit pipeline (the synthetic counterpart of
// analyzing measured spectra).

std::size_t next_pow2(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x && n < (1ull << 26)) n <<= 1;
  return n;
}

struct PipelineResult {
  double f_theta = 0.0, gamma_theta = 0.0; ///< fitted, Hz
  double f_y = 0.0, gamma_y = 0.0;         ///< fitted, Hz
};

PipelineResult run_pipeline(const Particle& particle, const TrapBeam& beam,
                            const GasEnvironment& gas, std::uint64_t seed,
                            bool fit_com) {
  const auto freq = optics::frequencies(particle, beam);
  const auto rates = gas::damping_rates(particle, gas);
  const double dt = dynamics::default_timestep(particle, beam);

  // Size the segments so the narrowest line to be fitted spans several
  // bins, then take enough segments to average the periodogram.
  double gamma_min = rates.gamma_theta;
  if (fit_com) gamma_min = std::min(gamma_min, rates.gamma_y);
  const double linewidth_hz = gamma_min / two_pi;
  std::size_t seglen = next_pow2(4.0 / (linewidth_hz * dt));
  seglen = std::clamp<std::size_t>(seglen, 1u << 12, 1u << 19);
  const std::uint64_t steps = 6 * static_cast<std::uint64_t>(seglen);

  const auto traj = dynamics::simulate(particle, beam, gas, gas.temperature,
                                       dt, steps, seed,
                                       dynamics::Mode::harmonic);
  PipelineResult result;
  {
    const auto spec = spectral::welch_psd(traj.theta, dt, seglen, 0.5);
    const double f0 = freq.omega_theta / two_pi;
    const auto fit = spectral::fit_lorentzian(spec, {0.7 * f0, 1.3 * f0});
    result.f_theta = fit.omega / two_pi;
    result.gamma_theta = fit.gamma / two_pi;
  }
  if (fit_com) {
    const auto spec = spectral::welch_psd(traj.y, dt, seglen, 0.5);
    const double f0 = freq.omega_y / two_pi;
    const auto fit = spectral::fit_lorentzian(spec, {0.6 * f0, 1.4 * f0});
    result.f_y = fit.omega / two_pi;
    result.gamma_y = fit.gamma / two_pi;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Subcommand implementations. Each returns the JSON summary for stdout.

json cmd_chi(const CommonOpts& opts) {
  const auto cfg = resolve_config(opts);
  require_valid(cfg.particle);
  const auto chi = optics::susceptibilities(cfg.particle);
  json summary = {{"aspect", cfg.particle.aspect()}, {"chi_x", chi.chi_x},
                  {"chi_y", chi.chi_y},              {"L_x", chi.L_x},
                  {"L_y", chi.L_y},                  {"L_z", chi.L_z}};
  if (!opts.out_path.empty()) {
    config::write_csv(opts.out_path,
                      {"chi_x", "chi_y", "L_x", "L_y", "L_z"},
                      {{chi.chi_x, chi.chi_y, chi.L_x, chi.L_y, chi.L_z}});
    emit_manifest(opts, &cfg, {opts.out_path});
  }
  return summary;
}

json cmd_freqs(const CommonOpts& opts, const std::string& power_sweep) {
  auto cfg = resolve_config(opts);
  std::vector<double> powers =
      power_sweep.empty() ? std::vector<double>{cfg.beam.power}
                          : parse_grid(power_sweep, false);
  std::vector<std::vector<double>> rows(powers.size());
  run_parallel(powers.size(), opts.jobs, [&](std::size_t i) {
    TrapBeam beam = cfg.beam;
    beam.power = powers[i];
    const auto freq = optics::frequencies(cfg.particle, beam);
    rows[i] = {powers[i], freq.omega_y / two_pi, freq.omega_theta / two_pi};
  });
  if (!opts.out_path.empty()) {
    config::write_csv(opts.out_path, {"power_W", "omega_y_Hz", "omega_theta_Hz"},
                      rows);
    emit_manifest(opts, &cfg, {opts.out_path});
  }
  const auto freq = optics::frequencies(cfg.particle, cfg.beam);
  return {{"power_W", cfg.beam.power},
          {"omega_y_Hz", freq.omega_y / two_pi},
          {"omega_theta_Hz", freq.omega_theta / two_pi},
          {"torsional_degenerate", freq.torsional_degenerate},
          {"points", rows.size()}};
}

json cmd_damping(const CommonOpts& opts, const std::string& pressure_sweep,
                 bool log_grid) {
  auto cfg = resolve_config(opts);
  std::vector<double> pressures =
      pressure_sweep.empty() ? std::vector<double>{cfg.gas.pressure}
                             : parse_grid(pressure_sweep, log_grid);
  std::vector<std::vector<double>> rows(pressures.size());
  std::atomic<int> warnings{0};
  run_parallel(pressures.size(), opts.jobs, [&](std::size_t i) {
    GasEnvironment gas = cfg.gas;
    gas.pressure = pressures[i];
    const auto rates = gas::damping_rates(cfg.particle, gas);
    const auto q = gas::quality_factors(cfg.particle, cfg.beam, gas);
    if (rates.knudsen_warning) warnings.fetch_add(1);
    rows[i] = {pressures[i], rates.gamma_x, rates.gamma_y, rates.gamma_theta,
               q.Q_y, q.Q_theta};
  });
  if (!opts.out_path.empty()) {
    config::write_csv(
        opts.out_path,
        {"pressure_Pa", "gamma_x", "gamma_y", "gamma_theta", "Q_y", "Q_theta"},
        rows);
    emit_manifest(opts, &cfg, {opts.out_path});
  }
  json summary = {{"points", rows.size()},
                  {"free_molecular_warnings", warnings.load()}};
  if (!rows.empty()) {
    summary["gamma_x"] = rows.front()[1];
    summary["gamma_y"] = rows.front()[2];
    summary["gamma_theta"] = rows.front()[3];
  }
  return summary;
}

json cmd_simulate(const CommonOpts& opts, double dt, double steps_real,
                  const std::string& mode_name, double temperature,
                  unsigned ensemble, double detector_floor) {
  auto cfg = resolve_config(opts);
  if (opts.out_path.empty())
    throw std::invalid_argument("simulate: --out is required");
  if (!(steps_real >= 2.0))
    throw std::invalid_argument("simulate: --steps must be >= 2");
  const auto n_steps = static_cast<std::uint64_t>(steps_real);
  const dynamics::Mode mode = [&] {
    if (mode_name == "harmonic") return dynamics::Mode::harmonic;
    if (mode_name == "full_potential") return dynamics::Mode::full_potential;
    throw std::invalid_argument(
        "simulate: --mode must be harmonic or full_potential");
  }();
  if (dt <= 0.0) dt = dynamics::default_timestep(cfg.particle, cfg.beam);
  if (temperature <= 0.0) temperature = cfg.gas.temperature;

  const unsigned count = std::max(1u, ensemble);
  std::vector<std::string> files(count);
  std::vector<double> theta_var(count, 0.0);
  run_parallel(count, opts.jobs, [&](std::size_t i) {
    const std::uint64_t seed =
        count == 1 ? opts.seed : rng::derive_seed(opts.seed, i);
    const auto traj = dynamics::simulate(cfg.particle, cfg.beam, cfg.gas,
                                         temperature, dt, n_steps, seed, mode);
    std::vector<std::string> header = {"t_s", "y_m", "vy_ms", "theta_rad",
                                       "omega_rads"};
    std::optional<dynamics::DetectorSignals> det;
    if (detector_floor >= 0.0) {
      det = dynamics::detector_signals(traj, detector_floor);
      header.push_back("com_signal");
      header.push_back("tor_signal");
    }
    std::vector<std::vector<double>> rows(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
      rows[k] = {static_cast<double>(k) * dt, traj.y[k], traj.vy[k],
                 traj.theta[k], traj.omega[k]};
      if (det) {
        rows[k].push_back(det->com[k]);
        rows[k].push_back(det->tor[k]);
      }
    }
    char tag[16];
    std::snprintf(tag, sizeof(tag), "_%03zu", i);
    files[i] = count == 1 ? opts.out_path : csv_sibling(opts.out_path, tag);
    config::write_csv(files[i], header, rows);
    double v = 0.0;
    for (double th : traj.theta) v += th * th;
    theta_var[i] = v / static_cast<double>(traj.size());
  });
  emit_manifest(opts, &cfg, files);
  return {{"files", files},
          {"steps", n_steps},
          {"dt_s", dt},
          {"mode", mode_name},
          {"temperature_K", temperature},
          {"theta_variance", theta_var}};
}

json cmd_psd(const CommonOpts& opts, const std::string& in_path,
             const std::string& column, std::size_t segment, double overlap,
             const std::string& window, double dt_override) {
  if (in_path.empty()) throw std::invalid_argument("psd: --in is required");
  if (opts.out_path.empty())
    throw std::invalid_argument("psd: --out is required");
  const auto table = read_csv(in_path);
  const auto& series = table.column(column);
  double dt = dt_override;
  if (dt <= 0.0) {
    const auto& t = table.column("t_s");
    if (t.size() < 2)
      throw std::invalid_argument("psd: cannot infer dt from t_s");
    dt = t[1] - t[0];
  }
  const auto spec = spectral::welch_psd(series, dt, segment, overlap, window);
  std::vector<std::vector<double>> rows(spec.freqs.size());
  for (std::size_t k = 0; k < spec.freqs.size(); ++k)
    rows[k] = {spec.freqs[k], spec.psd[k]};
  config::write_csv(opts.out_path, {"freq_Hz", "psd"}, rows);
  emit_manifest(opts, nullptr, {opts.out_path});
  return {{"bins", spec.freqs.size()},
          {"segments", spec.segments},
          {"segment_len", spec.segment_len},
          {"overlap", spec.overlap},
          {"window", spec.window},
          {"dt_s", dt}};
}

json cmd_fit(const CommonOpts& opts, const std::string& in_path,
             const std::string& band_text) {
  if (in_path.empty()) throw std::invalid_argument("fit: --in is required");
  if (band_text.empty())
    throw std::invalid_argument("fit: --band lo:hi is required");
  const auto table = read_csv(in_path);
  spectral::Spectrum spec;
  spec.freqs = table.column("freq_Hz");
  spec.psd = table.column("psd");
  std::vector<std::string> parts;
  std::stringstream ss(band_text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 2)
    throw std::invalid_argument("fit: --band must be lo:hi in Hz");
  const auto fit = spectral::fit_lorentzian(
      spec, {std::stod(parts[0]), std::stod(parts[1])});
  json result = {{"omega_Hz", fit.omega / two_pi},
                 {"gamma_Hz", fit.gamma / two_pi},
                 {"amplitude", fit.amplitude},
                 {"floor", fit.floor},
                 {"omega_stderr_Hz", fit.omega_err / two_pi},
                 {"gamma_stderr_Hz", fit.gamma_err / two_pi},
                 {"amplitude_stderr", fit.amplitude_err},
                 {"floor_stderr", fit.floor_err},
                 {"multiple_peaks", fit.multiple_peaks},
                 {"iterations", fit.iterations}};
  if (!opts.out_path.empty()) {
    std::ofstream out(opts.out_path);
    out << result.dump(2) << "\n";
    emit_manifest(opts, nullptr, {opts.out_path});
  }
  return result;
}

json cmd_cool(const CommonOpts& opts, double cavity_length,
              const std::string& drive_sweep, bool log_grid) {
  auto cfg = resolve_config(opts, true);
  if (!cfg.cavity)
    throw std::invalid_argument(
        "cool: config must provide a \"cavity\" section");
  if (cavity_length > 0.0) cfg.cavity->length = cavity_length;
  require_valid(*cfg.cavity);

  cooling::CoolingSetup setup{*cfg.cavity, cfg.particle, cfg.beam, 0.0,
                              std::nullopt, constants::pi / 4.0};
  const auto drives = parse_grid(
      drive_sweep.empty() ? "1e6:1e10:50" : drive_sweep, log_grid);
  const auto table =
      cooling::cooling_sweep(setup, drives, cfg.gas, cfg.gas.temperature);

  std::vector<std::vector<double>> rows;
  rows.reserve(table.size());
  bool theta_ground = false, com_ground = false;
  for (const auto& row : table) {
    theta_ground = theta_ground || row.torsional.n_ss < 1.0;
    com_ground = com_ground || row.com.n_ss < 1.0;
    rows.push_back({row.n_photons, row.torsional.n_ss, row.com.n_ss,
                    row.torsional.A_minus, row.torsional.A_plus,
                    row.com.A_minus, row.com.A_plus, row.torsional.n_min,
                    row.com.n_min,
                    row.torsional.n_ss < 1.0 ? 1.0 : 0.0,
                    row.com.n_ss < 1.0 ? 1.0 : 0.0});
  }
  if (!opts.out_path.empty()) {
    config::write_csv(opts.out_path,
                      {"n_photons", "n_theta", "n_y", "A_minus_theta",
                       "A_plus_theta", "A_minus_y", "A_plus_y", "n_min_theta",
                       "n_min_y", "ground_state_theta", "ground_state_y"},
                      rows);
    emit_manifest(opts, &cfg, {opts.out_path});
  }
  const auto freq = optics::frequencies(cfg.particle, cfg.beam);
  return {{"kappa_rads", cfg.cavity->decay_rate()},
          {"g_theta_rads", cooling::coupling_torsional(setup)},
          {"g_y_rads", cooling::coupling_com(setup)},
          {"omega_theta_Hz", freq.omega_theta / two_pi},
          {"omega_y_Hz", freq.omega_y / two_pi},
          {"torsional_reaches_ground_state", theta_ground},
          {"com_reaches_ground_state", com_ground},
          {"points", rows.size()}};
}

json cmd_torque(const CommonOpts& opts, double pressure_override) {
  auto cfg = resolve_config(opts);
  if (pressure_override >= 0.0) cfg.gas.pressure = pressure_override;
  const auto freq = optics::frequencies(cfg.particle, cfg.beam);
  const auto q = gas::quality_factors(cfg.particle, cfg.beam, cfg.gas);
  if (q.torsional_degenerate)
    throw std::invalid_argument("torque: sphere has no torsional mode");
  if (q.unbounded)
    throw std::invalid_argument(
        "torque: zero pressure gives an unbounded quality factor");
  const auto sens = sensing::torque_sensitivity(
      cfg.gas.temperature, cfg.particle.moment_of_inertia(), freq.omega_theta,
      q.Q_theta);
  json result = {{"M_min_per_rtHz", sens.M_min_per_rtHz},
                 {"Q_theta", q.Q_theta},
                 {"omega_theta_Hz", freq.omega_theta / two_pi},
                 {"I", cfg.particle.moment_of_inertia()},
                 {"temperature_K", cfg.gas.temperature},
                 {"pressure_Pa", cfg.gas.pressure}};
  if (!opts.out_path.empty()) {
    std::ofstream out(opts.out_path);
    out << result.dump(2) << "\n";
    emit_manifest(opts, &cfg, {opts.out_path});
  }
  return result;
}

json cmd_sweep(const CommonOpts& opts, const std::string& axis_spec) {
  auto cfg = resolve_config(opts);
  if (opts.out_path.empty())
    throw std::invalid_argument("sweep: --out is required");
  const std::string axes_help =
      "beam.power, gas.pressure, cavity.length, particle.scale, "
      "particle.aspect";
  const auto first_colon = axis_spec.find(':');
  if (first_colon == std::string::npos)
    throw std::invalid_argument(
        "sweep: axis must be name:start:stop:count[:log]; axes: " +
        axes_help);
  const std::string axis = axis_spec.substr(0, first_colon);
  const auto grid = parse_grid(axis_spec.substr(first_colon + 1), false);

  const auto apply_axis = [&](config::Config base,
                              double v) -> config::Config {
    if (axis == "beam.power") {
      base.beam.power = v;
    } else if (axis == "gas.pressure") {
      base.gas.pressure = v;
    } else if (axis == "cavity.length") {
      if (!base.cavity)
        throw std::invalid_argument(
            "sweep: cavity.length needs a \"cavity\" config section");
      base.cavity->length = v;
    } else if (axis == "particle.scale") {
      base.particle.rx *= v;
      base.particle.ry *= v;
      base.particle.rz *= v;
    } else if (axis == "particle.aspect") {
      base.particle.ry = v * base.particle.rx;
      base.particle.rz = base.particle.ry;
    } else {
      throw std::invalid_argument("sweep: unknown axis \"" + axis +
                                  "\"; axes: " + axes_help);
    }
    return base;
  };

  const bool with_cavity = cfg.cavity.has_value();
  std::vector<std::string> header = {axis,      "omega_y_Hz", "omega_theta_Hz",
                                     "gamma_x", "gamma_y",    "gamma_theta",
                                     "Q_y",     "Q_theta"};
  if (with_cavity) {
    header.push_back("g_theta_rads");
    header.push_back("g_y_rads");
    header.push_back("kappa_rads");
  }

  std::vector<std::vector<double>> rows(grid.size());
  run_parallel(grid.size(), opts.jobs, [&](std::size_t i) {
    const auto point = apply_axis(cfg, grid[i]);
    const auto freq = optics::frequencies(point.particle, point.beam);
    const auto rates = gas::damping_rates(point.particle, point.gas);
    const auto q = gas::quality_factors(point.particle, point.beam, point.gas);
    rows[i] = {grid[i],       freq.omega_y / two_pi,
               freq.omega_theta / two_pi, rates.gamma_x,
               rates.gamma_y, rates.gamma_theta,
               q.Q_y,         q.Q_theta};
    if (with_cavity) {
      cooling::CoolingSetup setup{*point.cavity, point.particle, point.beam,
                                  0.0, std::nullopt, constants::pi / 4.0};
      rows[i].push_back(freq.torsional_degenerate
                            ? 0.0
                            : cooling::coupling_torsional(setup));
      rows[i].push_back(cooling::coupling_com(setup));
      rows[i].push_back(point.cavity->decay_rate());
    }
  });
  config::write_csv(opts.out_path, header, rows);
  emit_manifest(opts, &cfg, {opts.out_path});
  return {{"axis", axis}, {"points", grid.size()}, {"out", opts.out_path}};
}

// --- figures ---------------------------------------------------------------

json figure_3a(const CommonOpts& opts, const config::Config& cfg,
               std::vector<std::string>& files) {
  const int n = 201;
  std::vector<std::vector<double>> rows(n);
  const double w = cfg.beam.waist;
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    const double y = (-1.5 + 3.0 * f) * w;
    const double theta = (-0.5 + f) * constants::pi;
    rows[i] = {y, optics::potential(cfg.particle, cfg.beam, y, 0.0), theta,
               optics::potential(cfg.particle, cfg.beam, 0.0, theta)};
  }
  config::write_csv(opts.out_path,
                    {"y_m", "potential_vs_y_J", "theta_rad",
                     "potential_vs_theta_J"},
                    rows);
  files.push_back(opts.out_path);
  return {{"points", n}};
}

json figure_3b(const CommonOpts& opts, const config::Config& cfg,
               std::vector<std::string>& files) {
  const auto sizes = parse_grid("30e-9:100e-9:71", false);
  const double aspect = cfg.particle.aspect();
  std::vector<std::vector<double>> rows(sizes.size());
  run_parallel(sizes.size(), opts.jobs, [&](std::size_t i) {
    Particle p = cfg.particle;
    p.rx = sizes[i];
    p.ry = p.rz = aspect * sizes[i];
    const auto freq = optics::frequencies(p, cfg.beam);
    rows[i] = {sizes[i], freq.omega_y / two_pi, freq.omega_theta / two_pi};
  });
  config::write_csv(opts.out_path, {"rx_m", "omega_y_Hz", "omega_theta_Hz"},
                    rows);
  files.push_back(opts.out_path);
  return {{"points", sizes.size()}};
}

json figure_3c(const CommonOpts& opts, const config::Config& cfg,
               std::vector<std::string>& files) {
  const auto pressures =
      parse_grid("1.333e-6:1.333e4:61:log", false); // 1e-8 .. 1e2 Torr
  std::vector<std::vector<double>> rows(pressures.size());
  run_parallel(pressures.size(), opts.jobs, [&](std::size_t i) {
    GasEnvironment gas = cfg.gas;
    gas.pressure = pressures[i];
    const auto q = gas::quality_factors(cfg.particle, cfg.beam, gas);
    rows[i] = {pressures[i], q.Q_y, q.Q_theta};
  });
  config::write_csv(opts.out_path, {"pressure_Pa", "Q_y", "Q_theta"}, rows);
  files.push_back(opts.out_path);
  return {{"points", pressures.size()}};
}

json figure_3d(const CommonOpts& opts, const config::Config& cfg,
               std::vector<std::string>& files) {
  const auto aspects = parse_grid("0.3:1.0:71", false);
  std::vector<std::vector<double>> rows(aspects.size());
  run_parallel(aspects.size(), opts.jobs, [&](std::size_t i) {
    Particle p = cfg.particle;
    p.ry = p.rz = aspects[i] * p.rx;
    const auto freq = optics::frequencies(p, cfg.beam);
    rows[i] = {aspects[i], freq.omega_y / two_pi, freq.omega_theta / two_pi};
  });
  config::write_csv(opts.out_path, {"aspect", "omega_y_Hz", "omega_theta_Hz"},
                    rows);
  files.push_back(opts.out_path);
  return {{"points", aspects.size()}};
}

json figure_4a(const CommonOpts& opts, const config::Config& cfg,
               std::vector<std::string>& files) {
  if (!cfg.cavity)
    throw std::invalid_argument("figures 4a: config needs a cavity section");
  const auto lengths = parse_grid("0.5e-3:5e-3:46", false);
  std::vector<std::vector<double>> rows(lengths.size());
  run_parallel(lengths.size(), opts.jobs, [&](std::size_t i) {
    Cavity cav = *cfg.cavity;
    cav.length = lengths[i];
    cooling::CoolingSetup setup{cav, cfg.particle, cfg.beam, 0.0, std::nullopt,
                                constants::pi / 4.0};
    rows[i] = {lengths[i], cooling::coupling_torsional(setup),
               cooling::coupling_com(setup), cav.decay_rate()};
  });
  config::write_csv(opts.out_path,
                    {"length_m", "g_theta_rads", "g_y_rads", "kappa_rads"},
                    rows);
  files.push_back(opts.out_path);
  return {{"points", lengths.size()}};
}

json figure_4b(const CommonOpts& opts, const config::Config& cfg,
               double cavity_length, std::vector<std::string>& files) {
  if (!cfg.cavity)
    throw std::invalid_argument("figures 4b: config needs a cavity section");
  Cavity cav = *cfg.cavity;
  if (cavity_length > 0.0) cav.length = cavity_length;
  cooling::CoolingSetup setup{cav, cfg.particle, cfg.beam, 0.0, std::nullopt,
                              constants::pi / 4.0};
  const auto drives = parse_grid("1e4:1e12:81:log", false);
  const auto table =
      cooling::cooling_sweep(setup, drives, cfg.gas, cfg.gas.temperature);
  std::vector<std::vector<double>> rows;
  bool theta_ground = false, com_ground = false;
  for (const auto& row : table) {
    theta_ground = theta_ground || row.torsional.n_ss < 1.0;
    com_ground = com_ground || row.com.n_ss < 1.0;
    rows.push_back({row.n_photons, row.torsional.n_ss, row.com.n_ss,
                    row.torsional.n_ss < 1.0 ? 1.0 : 0.0,
                    row.com.n_ss < 1.0 ? 1.0 : 0.0});
  }
  config::write_csv(opts.out_path,
                    {"n_photons", "n_theta", "n_y", "ground_state_theta",
                     "ground_state_y"},
                    rows);
  files.push_back(opts.out_path);
  return {{"points", rows.size()},
          {"cavity_length_m", cav.length},
          {"torsional_reaches_ground_state", theta_ground},
          {"com_reaches_ground_state", com_ground}};
}

json figure_2b(const CommonOpts& opts, const config::Config& cfg,
               std::vector<std::string>& files) {
  // Fitted resonance frequencies vs trapping power for two particle
  // geometries, through the full simulate -> PSD -> fit pipeline, then the
  // A sqrt(P) regression per geometry and mode.
  const std::vector<Particle> geometries = {
      cfg.particle, Particle::diamond(60e-9, 60e-9 * cfg.particle.aspect())};
  const std::vector<double> powers = {0.025, 0.05, 0.1, 0.2};
  GasEnvironment gas = cfg.gas;
  gas.pressure = 10.0 * constants::torr; // narrow, well-resolved lines

  struct Point {
    double geometry = 0.0, power = 0.0, f_theta = 0.0, f_y = 0.0;
  };
  std::vector<Point> points(geometries.size() * powers.size());
  run_parallel(points.size(), opts.jobs, [&](std::size_t i) {
    const std::size_t g = i / powers.size();
    const std::size_t k = i % powers.size();
    TrapBeam beam = cfg.beam;
    beam.power = powers[k];
    const auto fit = run_pipeline(geometries[g], beam, gas,
                                  rng::derive_seed(opts.seed, i), true);
    points[i] = {static_cast<double>(g + 1), powers[k], fit.f_theta, fit.f_y};
  });

  std::vector<std::vector<double>> rows;
  for (const auto& p : points)
    rows.push_back({p.geometry, p.power, p.f_theta, p.f_y});
  config::write_csv(
      opts.out_path,
      {"geometry", "power_W", "omega_theta_fit_Hz", "omega_y_fit_Hz"}, rows);
  files.push_back(opts.out_path);

  json law = json::array();
  std::vector<std::vector<double>> fit_rows;
  for (std::size_t g = 0; g < geometries.size(); ++g) {
    std::vector<std::pair<double, double>> th, com;
    for (const auto& p : points)
      if (p.geometry == static_cast<double>(g + 1)) {
        th.emplace_back(p.power, two_pi * p.f_theta);
        com.emplace_back(p.power, two_pi * p.f_y);
      }
    const auto [a_th, r_th] = spectral::fit_sqrt_power(th);
    const auto [a_y, r_y] = spectral::fit_sqrt_power(com);
    law.push_back({{"geometry", g + 1},
                   {"A_theta", a_th},
                   {"residual_theta", r_th},
                   {"A_y", a_y},
                   {"residual_y", r_y}});
    fit_rows.push_back(
        {static_cast<double>(g + 1), a_th, r_th, a_y, r_y});
  }
  const std::string fit_path = csv_sibling(opts.out_path, "_sqrtP");
  config::write_csv(fit_path,
                    {"geometry", "A_theta", "residual_theta", "A_y",
                     "residual_y"},
                    fit_rows);
  files.push_back(fit_path);
  return {{"points", rows.size()}, {"sqrtP_fits", law}};
}

json figure_2c(const CommonOpts& opts, const config::Config& cfg,
               std::vector<std::string>& files) {
  const std::vector<double> torrs = {1.0, 10.0, 100.0};
  std::vector<std::vector<double>> rows(torrs.size());
  std::vector<std::pair<double, double>> points(torrs.size());
  run_parallel(torrs.size(), opts.jobs, [&](std::size_t i) {
    GasEnvironment gas = cfg.gas;
    gas.pressure = torrs[i] * constants::torr;
    const auto fit = run_pipeline(cfg.particle, cfg.beam, gas,
                                  rng::derive_seed(opts.seed, i), false);
    rows[i] = {gas.pressure, fit.f_theta, fit.gamma_theta};
    points[i] = {gas.pressure, two_pi * fit.f_theta};
  });
  const auto [mean, nstd] = spectral::pressure_independence(points);
  config::write_csv(
      opts.out_path,
      {"pressure_Pa", "omega_theta_fit_Hz", "gamma_theta_fit_Hz"}, rows);
  files.push_back(opts.out_path);
  return {{"points", rows.size()},
          {"mean_omega_theta_Hz", mean / two_pi},
          {"normalized_std", nstd}};
}

json figure_2d(const CommonOpts& opts, const config::Config& cfg,
               std::vector<std::string>& files) {
  const std::vector<double> powers = {0.025, 0.05, 0.1, 0.2};
  GasEnvironment gas = cfg.gas;
  gas.pressure = 10.0 * constants::torr;
  std::vector<std::vector<double>> rows(powers.size());
  run_parallel(powers.size(), opts.jobs, [&](std::size_t i) {
    TrapBeam beam = cfg.beam;
    beam.power = powers[i];
    const auto fit = run_pipeline(cfg.particle, beam, gas,
                                  rng::derive_seed(opts.seed, i), true);
    const double model = optics::frequency_ratio(cfg.particle, beam);
    rows[i] = {powers[i], fit.f_theta / fit.f_y, model};
  });
  config::write_csv(opts.out_path, {"power_W", "ratio_fit", "ratio_model"},
                    rows);
  files.push_back(opts.out_path);
  double lo = rows[0][1], hi = rows[0][1];
  for (const auto& r : rows) {
    lo = std::min(lo, r[1]);
    hi = std::max(hi, r[1]);
  }
  return {{"points", rows.size()},
          {"ratio_spread", (hi - lo) / (0.5 * (hi + lo))}};
}

json cmd_figures(CommonOpts opts, const std::string& figure_id,
                 double cavity_length) {
  const bool cavity_fig = figure_id.rfind("4", 0) == 0;
  auto cfg = resolve_config(opts, cavity_fig);
  if (opts.out_path.empty()) opts.out_path = "figure_" + figure_id + ".csv";

  std::vector<std::string> files;
  json summary;
  if (figure_id == "2b") summary = figure_2b(opts, cfg, files);
  else if (figure_id == "2c") summary = figure_2c(opts, cfg, files);
  else if (figure_id == "2d") summary = figure_2d(opts, cfg, files);
  else if (figure_id == "3a") summary = figure_3a(opts, cfg, files);
  else if (figure_id == "3b") summary = figure_3b(opts, cfg, files);
  else if (figure_id == "3c") summary = figure_3c(opts, cfg, files);
  else if (figure_id == "3d") summary = figure_3d(opts, cfg, files);
  else if (figure_id == "4a") summary = figure_4a(opts, cfg, files);
  else if (figure_id == "4b")
    summary = figure_4b(opts, cfg, cavity_length, files);
  else
    throw std::invalid_argument(
        "figures: unknown id \"" + figure_id +
        "\"; valid ids: 2b 2c 2d 3a 3b 3c 3d 4a 4b");
  emit_manifest(opts, &cfg, files);
  summary["figure"] = figure_id;
  summary["files"] = files;
  return summary;
}

} // namespace

int main(int argc, char** argv) {
  std::string command_line;
  for (int i = 0; i < argc; ++i) {
    if (i) command_line += ' ';
    command_line += argv[i];
  }

  CLI::App app{"levitated-spheroid optomechanics toolkit"};
  app.set_version_flag("--version", levitodyn::version);
  app.require_subcommand(1);

  CommonOpts opts;
  opts.command_line = command_line;

  // chi
  auto* chi = app.add_subcommand("chi", "susceptibilities and shape factors");
  add_common(chi, opts);

  // freqs
  auto* freqs = app.add_subcommand("freqs", "trap vibration frequencies");
  add_common(freqs, opts);
  std::string power_sweep;
  freqs->add_option("--power-sweep", power_sweep, "P0:P1:N grid in W");

  // damping
  auto* damping = app.add_subcommand("damping", "gas damping and Q factors");
  add_common(damping, opts);
  std::string pressure_sweep;
  bool damping_log = false;
  damping->add_option("--pressure-sweep", pressure_sweep, "p0:p1:N grid in Pa");
  damping->add_flag("--log", damping_log, "logarithmic grid spacing");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Langevin trajectory");
  add_common(simulate, opts);
  double sim_dt = 0.0, sim_steps = 0.0, sim_temperature = 0.0;
  double detector_floor = -1.0;
  std::string sim_mode = "harmonic";
  unsigned ensemble = 0;
  simulate->add_option("--dt", sim_dt, "timestep in s (default: period/50)");
  simulate->add_option("--steps", sim_steps, "number of steps")->required();
  simulate->add_option("--mode", sim_mode, "harmonic|full_potential");
  simulate->add_option("--temperature", sim_temperature,
                       "bath temperature in K (default: gas temperature)");
  simulate->add_option("--ensemble", ensemble,
                       "write N independent trajectories");
  simulate->add_option("--detector-floor", detector_floor,
                       "append detector columns with this noise PSD");

  // psd
  auto* psd = app.add_subcommand("psd", "Welch power spectral density");
  add_common(psd, opts);
  std::string psd_in, psd_col = "theta_rad", psd_window = "hann";
  std::size_t psd_segment = 65536;
  double psd_overlap = 0.5, psd_dt = 0.0;
  psd->add_option("--in", psd_in, "trajectory CSV")->required();
  psd->add_option("--col", psd_col, "column to analyze");
  psd->add_option("--segment", psd_segment, "segment length in samples");
  psd->add_option("--overlap", psd_overlap, "segment overlap fraction");
  psd->add_option("--window", psd_window, "hann|rect");
  psd->add_option("--dt", psd_dt, "sample interval (default: from t_s)");

  // fit
  auto* fit = app.add_subcommand("fit", "Lorentzian line fit of a PSD");
  add_common(fit, opts);
  std::string fit_in, fit_band;
  fit->add_option("--in", fit_in, "spectrum CSV (freq_Hz,psd)")->required();
  fit->add_option("--band", fit_band, "f_lo:f_hi fit band in Hz")->required();

  // cool
  auto* cool = app.add_subcommand("cool", "sideband-cooling phonon numbers");
  add_common(cool, opts);
  double cool_length = 0.0;
  std::string drive_sweep;
  bool cool_log = true;
  cool->add_option("--cavity-length", cool_length, "override cavity length");
  cool->add_option("--drive-sweep", drive_sweep,
                   "n0:n1:N intracavity photon grid (default 1e6:1e10:50)");
  cool->add_flag("--log,!--linear", cool_log, "grid spacing (default log)");

  // torque
  auto* torque = app.add_subcommand("torque", "torque sensitivity");
  add_common(torque, opts);
  double torque_pressure = -1.0;
  torque->add_option("--pressure", torque_pressure, "override pressure in Pa");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid evaluation of derived "
                                            "quantities");
  add_common(sweep, opts);
  std::string axis_spec;
  sweep->add_option("--axis", axis_spec, "name:start:stop:count[:log]")
      ->required();

  // figures
  auto* figures = app.add_subcommand("figures", "bundled reference datasets");
  add_common(figures, opts);
  std::string figure_id;
  double fig_cavity_length = 0.0;
  figures->add_option("id", figure_id, "2b 2c 2d 3a 3b 3c 3d 4a 4b")
      ->required();
  figures->add_option("--cavity-length", fig_cavity_length,
                      "override cavity length (4b)");

  CLI11_PARSE(app, argc, argv);

  try {
    json summary;
    if (app.got_subcommand(chi)) summary = cmd_chi(opts);
    else if (app.got_subcommand(freqs)) summary = cmd_freqs(opts, power_sweep);
    else if (app.got_subcommand(damping))
      summary = cmd_damping(opts, pressure_sweep, damping_log);
    else if (app.got_subcommand(simulate))
      summary = cmd_simulate(opts, sim_dt, sim_steps, sim_mode,
                             sim_temperature, ensemble, detector_floor);
    else if (app.got_subcommand(psd))
      summary = cmd_psd(opts, psd_in, psd_col, psd_segment, psd_overlap,
                        psd_window, psd_dt);
    else if (app.got_subcommand(fit)) summary = cmd_fit(opts, fit_in, fit_band);
    else if (app.got_subcommand(cool))
      summary = cmd_cool(opts, cool_length, drive_sweep, cool_log);
    else if (app.got_subcommand(torque))
      summary = cmd_torque(opts, torque_pressure);
    else if (app.got_subcommand(sweep)) summary = cmd_sweep(opts, axis_spec);
    else if (app.got_subcommand(figures))
      summary = cmd_figures(opts, figure_id, fig_cavity_length);
    print_summary(opts, summary);
  } catch (const std::exception& e) {
    const json error = {{"error", e.what()}, {"command", command_line}};
    std::cout << error.dump(2) << "\n";
    return 1;
  }
  return 0;
}
