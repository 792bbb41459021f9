#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "levitodyn/constants.hpp"

// Deterministic random-number utilities. The engine is std::mt19937_64,
// whose output sequence the C++ standard pins exactly; the uniform and
// normal transforms are written out here because the standard library's
// distribution objects are implementation-defined and would break
// bit-for-bit reproducibility across toolchains.

namespace levitodyn::rng {

/// SplitMix64 step: advances `state` and returns the next value. Used to
/// derive decorrelated stream seeds from a master seed (one call per
/// stream index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Seed for sub-stream `index` of a master seed, without shared state.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t state = master;
  std::uint64_t out = 0;
  // Two mixing rounds over (master, index) so that nearby master seeds and
  // nearby indices land in unrelated engine states.
  out = splitmix64(state);
  state ^= index * 0x9e3779b97f4a7c15ull;
  out ^= splitmix64(state);
  return out;
}

/// One independent random stream: uniforms, standard normals.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) *
           (1.0 / 9007199254740992.0);
  }

  /// Standard normal deviate via Box-Muller (pairs cached).
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * constants::pi * uniform();
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace levitodyn::rng
