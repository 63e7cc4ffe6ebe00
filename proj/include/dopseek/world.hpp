// SPDX-License-Identifier: Apache-2.0
//
// 2D world geometry: source fixed at the origin, scatterer annulus around
// it, constant-speed UAV kinematics.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dopseek/common.hpp"
#include "dopseek/rng.hpp"

namespace dopseek {

/// One local scatterer: polar position about the source plus its complex
/// reflection coefficient.
struct Scatterer {
    double angle = 0.0;   // radians in (-pi, pi]
    double radius = 0.0;  // meters, inside [R_in, R]
    std::complex<double> reflection{0.0, 0.0};  // |reflection| <= 1

    Vec2 position() const { return {radius * std::cos(angle), radius * std::sin(angle)}; }
};

/// Immutable world description: geometry, channel and timing constants.
/// Defaults are the reference simulation setup.
struct Scenario {
    double d_init = 5000.0;      // initial source-UAV range, m
    double R = 200.0;            // scatterer annulus outer radius, m
    double R_in = 100.0;         // annulus inner radius, m
    int L = 20;                  // scatterer count
    double f_c = 2.0e9;          // carrier frequency, Hz
    double v = 10.0;             // UAV speed, m/s
    double c = 2.998e8;          // propagation speed, m/s
    double sigma_n2_db = -70.0;  // receiver noise power, dB
    double snr_init_db = 0.0;    // average received SNR at d_init, dB
    double d_v = 200.0;          // success radius, m
    double T_slot = 0.05;        // beacon repetition period, s
    double T_s = 1e-5;           // sample period, s
    int N = 1000;                // samples per beacon capture
    int N_fft = 4096;            // DFT length

    double sigma_phi = deg2rad(1.0);      // bearing sensor noise std, rad
    double cfo_drift_rate_std = 1.0;      // CFO random-walk intensity, Hz/sqrt(s)
    double cfo_init_range = 1000.0;       // initial CFO uniform on +-range, Hz
    double sigma_omega_abstract = kTwoPi; // frequency noise std for the abstract backend, rad/s
    double max_turn_rate = 0.0;           // heading slew limit, rad/s; 0 = unlimited

    double gain = 1.0;  // field calibration gain g, see calibrate_gain()
    bool gain_calibrated = false;

    std::vector<Scatterer> scatterers;

    double noise_power() const { return db_to_linear(sigma_n2_db); }
    double f_d_max() const { return v * f_c / c; }  // max Doppler, Hz
    double wavelength() const { return c / f_c; }
    double shortest_path() const { return d_init - d_v; }

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
        if (!(0.0 < R_in && R_in < R)) fail("need 0 < R_in < R");
        if (!(R < d_init)) fail("need R < d_init");
        if (!(0.0 < d_v && d_v < d_init)) fail("need 0 < d_v < d_init");
        if (!(v > 0.0)) fail("speed must be positive");
        if (!(f_c > 0.0 && c > 0.0)) fail("carrier and propagation speed must be positive");
        if (!(T_s > 0.0 && T_slot > 0.0)) fail("sample and slot periods must be positive");
        if (L < 0) fail("scatterer count must be non-negative");
        if (N < 1) fail("need at least one sample per capture");
        if (N > N_fft) fail("capture length exceeds DFT length");
        if (N * T_s > T_slot) fail("capture does not fit in a slot");
        if (sigma_phi < 0.0 || cfo_drift_rate_std < 0.0 || cfo_init_range < 0.0 ||
            sigma_omega_abstract < 0.0 || max_turn_rate < 0.0)
            fail("noise and rate parameters must be non-negative");
        for (const auto& s : scatterers) {
            constexpr double tol = 1e-9;
            if (s.radius < R_in - tol || s.radius > R + tol) fail("scatterer outside the annulus");
            if (std::abs(s.reflection) > 1.0 + tol) fail("|reflection| must be <= 1");
        }
    }
};

/// UAV kinematic state. Speed stays constant through an episode.
struct UavState {
    Vec2 p{};
    double heading = 0.0;  // radians
    double speed = 10.0;   // m/s
    double t = 0.0;        // s
};

/// Bearing from position p to the source at the origin, in (-pi, pi].
inline double bearing_to_source(Vec2 p) {
    if (p.x == 0.0 && p.y == 0.0)
        throw std::domain_error("bearing_to_source: undefined at the origin");
    // 0.0 - p.y keeps the signed zero positive so the +pi branch wins on the axis
    return std::atan2(0.0 - p.y, 0.0 - p.x);
}

/// Straight-line step at constant speed.
inline UavState advance(const UavState& s, double heading, double duration) {
    if (duration < 0.0) throw std::invalid_argument("advance: negative duration");
    UavState n = s;
    n.heading = wrap_angle(heading);
    n.p = s.p + (s.speed * duration) * Vec2{std::cos(heading), std::sin(heading)};
    n.t = s.t + duration;
    return n;
}

/// Per-scatterer path geometry as seen from UAV position p.
struct PathGeometry {
    double source_to_scatterer = 0.0;  // m
    double scatterer_to_uav = 0.0;     // m
    double scatterer_bearing = 0.0;    // bearing from the UAV to the scatterer, rad
};

inline PathGeometry path_angles(Vec2 p, const Scatterer& s) {
    const Vec2 sp = s.position();
    const Vec2 to_scat = sp - p;
    const double r = norm(to_scat);
    if (r == 0.0) throw std::domain_error("path_angles: UAV coincides with the scatterer");
    return {norm(sp), r, std::atan2(to_scat.y, to_scat.x)};
}

/// Draw `count` scatterers: angles uniform on (-pi, pi], positions uniform
/// over the annulus area, reflection magnitude uniform on [0.3, 0.9] with
/// uniform phase. Pure function of the seed.
inline std::vector<Scatterer> place_scatterers(std::uint64_t seed, int count, double inner,
                                               double outer) {
    if (!(0.0 < inner && inner < outer))
        throw std::invalid_argument("place_scatterers: need 0 < R_in < R");
    if (count < 0) throw std::invalid_argument("place_scatterers: negative count");
    Rng rng(seed);
    std::vector<Scatterer> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Scatterer s;
        s.angle = rng.angle();
        const double u = rng.uniform();
        s.radius = std::sqrt(inner * inner + u * (outer * outer - inner * inner));
        const double mag = rng.uniform(0.3, 0.9);
        s.reflection = std::polar(mag, rng.angle());
        out.push_back(s);
    }
    return out;
}

}  // namespace dopseek
