// SPDX-License-Identifier: Apache-2.0
//
// Complex baseband channel synthesis: line-of-sight plus scattered paths,
// each with its own Doppler, a drifting receiver carrier frequency offset,
// and additive circular Gaussian noise.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dopseek/common.hpp"
#include "dopseek/fft.hpp"
#include "dopseek/rng.hpp"
#include "dopseek/world.hpp"

namespace dopseek {

/// Receiver carrier frequency offset, modeled as a clamped random walk.
struct CfoProcess {
    double f_o = 0.0;             // current offset, Hz
    double drift_rate_std = 1.0;  // Hz per sqrt-second
    double f_o_max = 0.0;         // clamp bound, Hz (quarter of the sample rate)
    double f_o_init_range = 0.0;  // uniform bound of the initial draw, Hz
};

inline CfoProcess init_cfo(const Scenario& sc, Rng& rng) {
    CfoProcess cfo;
    cfo.drift_rate_std = sc.cfo_drift_rate_std;
    cfo.f_o_max = 1.0 / (4.0 * sc.T_s);
    cfo.f_o_init_range = std::min(sc.cfo_init_range, cfo.f_o_max);
    cfo.f_o = rng.uniform(-cfo.f_o_init_range, cfo.f_o_init_range);
    return cfo;
}

/// One random-walk step over dt seconds. Always consumes one draw so stream
/// positions stay aligned when the drift rate is zero.
inline CfoProcess evolve_cfo(const CfoProcess& cfo, double dt, Rng& rng) {
    if (dt < 0.0) throw std::invalid_argument("evolve_cfo: negative dt");
    CfoProcess next = cfo;
    next.f_o += cfo.drift_rate_std * std::sqrt(dt) * rng.normal();
    next.f_o = std::clamp(next.f_o, -cfo.f_o_max, cfo.f_o_max);
    return next;
}

/// One propagation path at the UAV: field amplitude, carrier phase at the
/// capture start, and Doppler in rad/s.
struct Path {
    double amplitude = 0.0;
    double phase = 0.0;
    double omega = 0.0;
};

/// All paths for one UAV pose; paths[0] is the line of sight.
struct PathSet {
    std::vector<Path> paths;
    double range = 0.0;       // source-UAV distance at build time
    double theta_star = 0.0;  // true bearing to the source
};

/// Geometry-consistent path set: the LoS path has amplitude g/d and Doppler
/// proportional to cos(bearing - heading); scattered path i has amplitude
/// g*|Gamma_i|/(d_i+r_i), carrier phase -beta*(path length) plus the
/// reflection phase, and Doppler set by the scatterer bearing.
inline PathSet build_paths(const Scenario& sc, const UavState& uav) {
    const double d = norm(uav.p);
    if (d == 0.0) throw std::domain_error("build_paths: UAV at the source");
    const double beta = kTwoPi / sc.wavelength();
    const double omega_d_max = kTwoPi * sc.f_d_max();

    PathSet ps;
    ps.range = d;
    ps.theta_star = bearing_to_source(uav.p);
    ps.paths.reserve(sc.scatterers.size() + 1);
    ps.paths.push_back({sc.gain / d, wrap_angle(-beta * d),
                        omega_d_max * std::cos(ps.theta_star - uav.heading)});
    for (const auto& s : sc.scatterers) {
        const PathGeometry g = path_angles(uav.p, s);
        const double len = g.source_to_scatterer + g.scatterer_to_uav;
        ps.paths.push_back({sc.gain * std::abs(s.reflection) / len,
                            wrap_angle(-beta * len + std::arg(s.reflection)),
                            omega_d_max * std::cos(g.scatterer_bearing - uav.heading)});
    }
    return ps;
}

/// Composite unit-gain field at p: LoS term 1/d plus the scattered sum.
inline cdouble field_at(std::span<const Scatterer> scatterers, Vec2 p, double beta) {
    const double d = norm(p);
    if (d == 0.0) throw std::domain_error("field_at: undefined at the origin");
    cdouble ef = std::polar(1.0 / d, -beta * d);
    for (const auto& s : scatterers) {
        const PathGeometry g = path_angles(p, s);
        const double len = g.source_to_scatterer + g.scatterer_to_uav;
        ef += s.reflection * std::polar(1.0 / len, -beta * len);
    }
    return ef;
}

/// Received signal strength |g*EF|^2 at position p.
inline double rss_at(const Scenario& sc, Vec2 p) {
    return std::norm(sc.gain * field_at(sc.scatterers, p, kTwoPi / sc.wavelength()));
}

/// Calibrate the global field gain so the ensemble-average received signal
/// power at range d_init equals noise_power * 10^(snr_init_db/10). The
/// ensemble averages |EF|^2 over fresh scatterer realizations and uniform
/// positions on the initial ring.
inline double calibrate_gain(const Scenario& sc, std::uint64_t seed = 0x5EEDCA11ull,
                             int samples = 16384) {
    if (samples < 1) throw std::invalid_argument("calibrate_gain: need samples >= 1");
    const double target = sc.noise_power() * db_to_linear(sc.snr_init_db);
    const double beta = kTwoPi / sc.wavelength();
    Rng rng(derive_seed(seed, 0, Stream::Calibration));
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        const auto scat = place_scatterers(rng.next_u64(), sc.L, sc.R_in, sc.R);
        const double ang = rng.angle();
        const Vec2 p{sc.d_init * std::cos(ang), sc.d_init * std::sin(ang)};
        acc += std::norm(field_at(scat, p, beta));
    }
    return std::sqrt(target / (acc / samples));
}

inline void ensure_calibrated(Scenario& sc) {
    if (!sc.gain_calibrated) {
        sc.gain = calibrate_gain(sc);
        sc.gain_calibrated = true;
    }
}

/// Ground truth carried alongside a synthesized capture.
struct CaptureTruth {
    double range = 0.0;
    double theta_star = 0.0;
    double f_o = 0.0;              // Hz at capture time
    std::vector<double> dopplers;  // per path, rad/s
};

/// One slot's complex baseband sample block.
struct BeaconCapture {
    std::vector<cdouble> samples;
    CaptureTruth truth;
    long slot_index = 0;
};

/// samples[n] = sum_k a_k * exp(j((omega_k + omega_cfo) n T_s + psi_k)) + noise.
/// Path frequencies are held constant across the capture; the UAV moves a
/// negligible fraction of the range in one capture interval.
inline BeaconCapture synthesize_beacon(const PathSet& ps, const CfoProcess& cfo,
                                       const Scenario& sc, Rng& rng, long slot_index = 0) {
    BeaconCapture cap;
    cap.slot_index = slot_index;
    cap.truth.range = ps.range;
    cap.truth.theta_star = ps.theta_star;
    cap.truth.f_o = cfo.f_o;
    cap.truth.dopplers.reserve(ps.paths.size());
    cap.samples.assign(static_cast<std::size_t>(sc.N), cdouble{});

    const double omega_cfo = kTwoPi * cfo.f_o;
    for (const auto& path : ps.paths) {
        cap.truth.dopplers.push_back(path.omega);
        cdouble cur = std::polar(path.amplitude, path.phase);
        const cdouble rot = std::polar(1.0, (path.omega + omega_cfo) * sc.T_s);
        for (auto& s : cap.samples) {
            s += cur;
            cur *= rot;
        }
    }
    const double sigma = std::sqrt(sc.noise_power() / 2.0);
    if (sigma > 0.0)
        for (auto& s : cap.samples) s += cdouble(sigma * rng.normal(), sigma * rng.normal());
    return cap;
}

}  // namespace dopseek
