#pragma once

#include <cstdint>

#include "levitodyn/types.hpp"

// Monte-Carlo free-molecular collision estimator for the spheroid damping
// rates: simulates individual molecule-surface collisions instead of using
// the closed-form surface-load integrals, and serves as the ground truth
// those formulas are tested against.
//
// Estimator: surface points are importance-sampled from the uniform sphere
// direction (area weight 4 pi J), incident molecules from the zero-drift
// flux-weighted Maxwellian of the local plate. A body velocity u enters
// only through the likelihood ratio exp(-(2 v.u + u^2)/(2 sigma^2)) of the
// drifting Maxwellian; evaluating +u and -u on common samples cancels all
// even orders in u, so the linear-response drag is recovered with O(u^2)
// relative bias at the default speed ratio of 0.05. Specular and diffuse
// momentum transfers are mixed deterministically by the accommodation
// coefficient rather than sampled, which removes the Bernoulli variance.

namespace levitodyn::gas {

struct McOptions {
  std::uint64_t samples = 1'000'000; ///< total collision samples
  std::uint64_t seed = 1;            ///< master seed; results are
                                     ///< deterministic per seed
  double speed_ratio = 0.05; ///< body speed / most probable gas speed
  int shards = 64;           ///< independent sub-streams; the shard results
                             ///< are order-independent, so they may be
                             ///< evaluated in parallel
};

struct McRates {
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  double gamma_theta = 0.0;
  double stderr_x = 0.0; ///< standard errors over shard means
  double stderr_y = 0.0;
  double stderr_theta = 0.0;
  double area_estimate = 0.0; ///< MC surface area (diagnostic: the
                              ///< importance weights average to the area)
  std::uint64_t samples_used = 0;
};

McRates mc_damping_rates(const Particle& particle, const GasEnvironment& gas,
                         const McOptions& options = {});

} // namespace levitodyn::gas
