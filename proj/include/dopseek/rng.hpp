// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random streams. Every stochastic component of an episode
// (scatterer draw, CFO walk, capture noise, bearing noise, initial pose)
// pulls from its own stream derived from (master seed, episode index, tag),
// so switching one noise source on or off never shifts the others.

#pragma once

#include <cstdint>
#include <random>

#include "dopseek/common.hpp"

namespace dopseek {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

enum class Stream : std::uint64_t {
    Episode = 1,       // per-episode master
    Scatterers = 2,    // positions and reflection coefficients
    Cfo = 3,           // initial offset and random walk
    CaptureNoise = 4,  // receiver noise (or abstract frequency noise)
    Bearing = 5,       // bearing sensor noise
    Init = 6,          // initial position angle and heading
    Calibration = 7,   // gain calibration ensemble
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, Stream tag) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s = h ^ (0x9E3779B97F4A7C15ull * (index + 1));
    h = splitmix64(s);
    s = h ^ (0xC2B2AE3D27D4EB4Full * (static_cast<std::uint64_t>(tag) + 1));
    return splitmix64(s);
}

/// Random source with hand-rolled distributions on top of mt19937_64, whose
/// output sequence is fixed by the standard. Identical seeds give identical
/// draw sequences on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform angle on (-pi, pi].
    double angle() { return kPi - kTwoPi * uniform(); }

    /// Standard normal draw; Box-Muller, consuming uniforms in pairs.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double a = kTwoPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace dopseek
