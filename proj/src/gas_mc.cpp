#include "levitodyn/gas_mc.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "levitodyn/random.hpp"

namespace levitodyn::gas {

using constants::pi;

namespace {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}
inline Vec3 normalized(Vec3 a) {
  const double n = std::sqrt(dot(a, a));
  return {a.x / n, a.y / n, a.z / n};
}

struct ShardSums {
  double fx = 0.0;     // sum of weight * dw(+Ux) * dp_x
  double fy = 0.0;     // sum of weight * dw(+Uy) * dp_y
  double mz = 0.0;     // sum of weight * dw(+w rot) * (X x dp)_z
  double area = 0.0;   // sum of area weights
};

ShardSums run_shard(const Particle& particle, const GasEnvironment& gas,
                    double speed, double omega, std::uint64_t n,
                    std::uint64_t seed) {
  rng::Stream rs(seed);
  const double a = particle.rx;
  const double b = particle.ry;
  const double sigma_acc = gas.accommodation;
  const double m_gas = gas.molecular_mass;
  const double sg = std::sqrt(constants::kB * gas.temperature / m_gas);
  const double inv_sg2 = 1.0 / (sg * sg);

  ShardSums sums;
  for (std::uint64_t i = 0; i < n; ++i) {
    // Uniform direction on the unit sphere -> surface point and normal.
    Vec3 s;
    double norm2;
    do {
      s = {rs.gauss(), rs.gauss(), rs.gauss()};
      norm2 = dot(s, s);
    } while (norm2 < 1e-24);
    s = (1.0 / std::sqrt(norm2)) * s;

    const Vec3 X{a * s.x, b * s.y, b * s.z};
    const double q = s.x * s.x / (a * a) + (1.0 - s.x * s.x) / (b * b);
    const double sqrt_q = std::sqrt(q);
    const Vec3 nrm{s.x / (a * sqrt_q), s.y / (b * sqrt_q),
                   s.z / (b * sqrt_q)};
    const double area_w = 4.0 * pi * a * b * b * sqrt_q;

    // Local tangent frame.
    const Vec3 ref = std::abs(nrm.z) < 0.9 ? Vec3{0.0, 0.0, 1.0}
                                           : Vec3{1.0, 0.0, 0.0};
    const Vec3 t1 = normalized(cross(nrm, ref));
    const Vec3 t2 = cross(nrm, t1);

    // Incident molecule from the static-plate flux distribution: the
    // normal component is Rayleigh-distributed (flux weighting), the
    // tangential components plain Gaussians.
    const double vn_in = sg * std::sqrt(-2.0 * std::log(rs.uniform()));
    const Vec3 v_in = (-vn_in) * nrm + (sg * rs.gauss()) * t1 +
                      (sg * rs.gauss()) * t2;

    // Diffusely re-emitted molecule (effusive distribution off the plate).
    const double vn_out = sg * std::sqrt(-2.0 * std::log(rs.uniform()));
    const Vec3 v_out = vn_out * nrm + (sg * rs.gauss()) * t1 +
                       (sg * rs.gauss()) * t2;

    // Momentum handed to the body per collision, accommodation-mixed.
    // Independent of the body velocity: the drift enters via the weights.
    const Vec3 dp = (1.0 - sigma_acc) * ((2.0 * m_gas * dot(v_in, nrm)) * nrm) +
                    sigma_acc * (m_gas * (v_in - v_out));

    // Antithetic likelihood-ratio difference w(+u) - w(-u) for each body
    // motion. u enters the drifting flux Maxwellian as
    // w(u) = exp(-(2 v.u + u^2)/(2 sigma^2)).
    const auto weight_diff = [&](const Vec3& u) {
      const double u2 = dot(u, u);
      return -2.0 * std::exp(-0.5 * u2 * inv_sg2) *
             std::sinh(dot(v_in, u) * inv_sg2);
    };

    const Vec3 ux{speed, 0.0, 0.0};
    const Vec3 uy{0.0, speed, 0.0};
    const Vec3 urot = cross(Vec3{0.0, 0.0, omega}, X);

    sums.fx += area_w * weight_diff(ux) * dp.x;
    sums.fy += area_w * weight_diff(uy) * dp.y;
    sums.mz += area_w * weight_diff(urot) * (X.x * dp.y - X.y * dp.x);
    sums.area += area_w;
  }
  return sums;
}

} // namespace

McRates mc_damping_rates(const Particle& particle, const GasEnvironment& gas,
                         const McOptions& options) {
  require_valid(particle);
  require_valid(gas);
  if (options.shards < 1) throw std::invalid_argument("mc: shards must be >= 1");
  if (options.samples < static_cast<std::uint64_t>(options.shards))
    throw std::invalid_argument("mc: need at least one sample per shard");
  if (!(options.speed_ratio > 0.0 && options.speed_ratio < 1.0))
    throw std::invalid_argument("mc: speed_ratio must be in (0, 1)");

  const double sg =
      std::sqrt(constants::kB * gas.temperature / gas.molecular_mass);
  const double v_mp = std::sqrt(2.0) * sg;
  const double speed = options.speed_ratio * v_mp;
  // Rotation rate chosen so the fastest surface point moves at `speed`.
  const double omega = speed / particle.rx;

  // Flux of molecules per unit area of a static plate: n sigma / sqrt(2 pi).
  const double flux = gas.number_density() * sg / std::sqrt(2.0 * pi);
  const double mass = particle.mass();
  const double inertia = particle.moment_of_inertia();

  const std::uint64_t per_shard =
      options.samples / static_cast<std::uint64_t>(options.shards);

  std::uint64_t seed_state = options.seed;
  std::vector<std::uint64_t> shard_seeds(options.shards);
  for (auto& s : shard_seeds) s = rng::splitmix64(seed_state);

  std::vector<double> gx(options.shards), gy(options.shards),
      gth(options.shards);
  double area_sum = 0.0;
  for (int k = 0; k < options.shards; ++k) {
    const ShardSums sums =
        run_shard(particle, gas, speed, omega, per_shard, shard_seeds[k]);
    const double inv_n = 1.0 / static_cast<double>(per_shard);
    // F(+u) - F(-u) = flux * E[area_w * dw * dp]; the drag rate follows
    // from F = -m gamma u with the antithetic difference spanning 2u.
    gx[k] = -flux * sums.fx * inv_n / (2.0 * mass * speed);
    gy[k] = -flux * sums.fy * inv_n / (2.0 * mass * speed);
    gth[k] = -flux * sums.mz * inv_n / (2.0 * inertia * omega);
    area_sum += sums.area * inv_n;
  }

  const auto mean_stderr = [&](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const auto n = static_cast<double>(v.size());
    const double se = v.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    return std::array<double, 2>{mean, se};
  };

  McRates out;
  const auto mx = mean_stderr(gx);
  const auto my = mean_stderr(gy);
  const auto mt = mean_stderr(gth);
  out.gamma_x = mx[0];
  out.stderr_x = mx[1];
  out.gamma_y = my[0];
  out.stderr_y = my[1];
  out.gamma_theta = mt[0];
  out.stderr_theta = mt[1];
  out.area_estimate = area_sum / static_cast<double>(options.shards);
  out.samples_used = per_shard * static_cast<std::uint64_t>(options.shards);
  return out;
}

} // namespace levitodyn::gas
