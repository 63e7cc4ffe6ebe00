// SPDX-License-Identifier: Apache-2.0
//
// Closed-loop episode execution (slot clock, channel -> estimator -> seeker
// -> kinematics), Monte Carlo batches, and summary statistics.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dopseek/channel.hpp"
#include "dopseek/common.hpp"
#include "dopseek/estimator.hpp"
#include "dopseek/rng.hpp"
#include "dopseek/seeker.hpp"
#include "dopseek/world.hpp"

namespace dopseek {

enum class Backend { Full, Abstract };

/// One slot of an episode, sampled at the slot end.
struct SlotRecord {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double d = 0.0;
    double phi = 0.0;          // heading flown during the slot
    double theta_k = 0.0;      // current direction estimate; NaN during stage 1
    double theta_star = 0.0;   // true bearing to the source
    double omega_tilde = 0.0;  // raw frequency measurement, rad/s
    bool accepted = true;
    double rss = 0.0;
    double omega_checked = 0.0;  // gated value fed to the seeker
    double omega_true = 0.0;     // CFO plus line-of-sight Doppler, rad/s
};

struct EpisodeLog {
    std::vector<SlotRecord> records;  // empty when record keeping is off
    bool success = false;             // reached d <= d_v (otherwise timed out)
    double distance_traveled = 0.0;   // v * T_slot summed over slots, m
    double elapsed = 0.0;             // s
    double max_t = 0.0;               // timeout bound, s
    double final_range = 0.0;         // m
    long slots = 0;
    std::uint64_t seed = 0;
    Backend backend = Backend::Full;
    double shortest_path = 0.0;  // d_init - d_v, m
};

struct EpisodeOptions {
    Backend backend = Backend::Full;
    std::uint64_t seed = 0;
    bool with_stage1 = true;
    std::optional<double> init_theta_err;  // fixed initial direction error; disables stage 1
    bool keep_records = true;
    double max_t_factor = 4.0;  // timeout as a multiple of the straight-line time
};

/// Run one episode. Scatterers, CFO, and all noises are drawn from streams
/// derived from the episode seed; the scenario's own scatterer list is
/// replaced for the episode. Timeout is a recorded outcome, not an error.
inline EpisodeLog run_episode(const Scenario& scenario, const SeekerConfig& seeker_cfg,
                              const EpisodeOptions& opt) {
    Scenario sc = scenario;
    sc.validate();
    seeker_cfg.validate();

    sc.scatterers = place_scatterers(derive_seed(opt.seed, 0, Stream::Scatterers), sc.L,
                                     sc.R_in, sc.R);
    ensure_calibrated(sc);

    Rng init_rng(derive_seed(opt.seed, 0, Stream::Init));
    Rng cfo_rng(derive_seed(opt.seed, 0, Stream::Cfo));
    Rng noise_rng(derive_seed(opt.seed, 0, Stream::CaptureNoise));
    Rng bearing_rng(derive_seed(opt.seed, 0, Stream::Bearing));

    const double pos_angle = init_rng.angle();
    UavState uav{{sc.d_init * std::cos(pos_angle), sc.d_init * std::sin(pos_angle)}, 0.0, sc.v,
                 0.0};
    double heading0 = init_rng.angle();

    SeekerConfig cfg = seeker_cfg;
    cfg.use_stage1 = opt.with_stage1;
    if (opt.init_theta_err) {
        heading0 = wrap_angle(bearing_to_source(uav.p) + *opt.init_theta_err);
        cfg.use_stage1 = false;
    }
    uav.heading = heading0;

    Seeker seeker(cfg, heading0, sc.T_slot, sc.v);
    CfoProcess cfo = init_cfo(sc, cfo_rng);

    EpisodeLog log;
    log.seed = opt.seed;
    log.backend = opt.backend;
    log.shortest_path = sc.shortest_path();
    log.max_t = opt.max_t_factor * sc.shortest_path() / sc.v;

    const double omega_d_max = kTwoPi * sc.f_d_max();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    long slot = 0;
    double prev_heading = heading0;

    while (true) {
        if (norm(uav.p) <= sc.d_v) {
            log.success = true;
            break;
        }
        if (uav.t > log.max_t) {
            log.success = false;
            break;
        }

        double heading = seeker.next_heading();
        if (sc.max_turn_rate > 0.0) {
            const double lim = sc.max_turn_rate * sc.T_slot;
            const double step = std::clamp(wrap_angle(heading - prev_heading), -lim, lim);
            heading = wrap_angle(prev_heading + step);
        }
        uav = advance(uav, heading, sc.T_slot);
        prev_heading = heading;
        cfo = evolve_cfo(cfo, sc.T_slot, cfo_rng);

        const double theta_star = bearing_to_source(uav.p);
        const double omega_true =
            kTwoPi * cfo.f_o + omega_d_max * std::cos(theta_star - heading);

        Measurement m;
        m.slot_index = slot;
        if (opt.backend == Backend::Full) {
            const PathSet paths = build_paths(sc, uav);
            const BeaconCapture cap = synthesize_beacon(paths, cfo, sc, noise_rng, slot);
            m.omega = estimate_frequency(cap.samples, sc.T_s, sc.N_fft);
        } else {
            m = measure_abstract(omega_true, heading, sc.sigma_omega_abstract, 0.0, noise_rng,
                                 slot);
        }
        m.phi = measure_bearing(heading, sc.sigma_phi, bearing_rng);

        const GateResult gate = seeker.observe(m);
        ++slot;

        if (opt.keep_records) {
            SlotRecord r;
            r.t = uav.t;
            r.x = uav.p.x;
            r.y = uav.p.y;
            r.d = norm(uav.p);
            r.phi = heading;
            r.theta_k = seeker.has_direction() ? seeker.theta() : nan;
            r.theta_star = theta_star;
            r.omega_tilde = m.omega;
            r.accepted = gate.accepted;
            r.rss = rss_at(sc, uav.p);
            r.omega_checked = gate.omega_checked;
            r.omega_true = omega_true;
            log.records.push_back(r);
        }
    }

    log.slots = slot;
    log.distance_traveled = static_cast<double>(slot) * sc.v * sc.T_slot;
    log.elapsed = uav.t;
    log.final_range = norm(uav.p);
    return log;
}

/// Minimal per-episode result kept by Monte Carlo batches.
struct EpisodeOutcome {
    bool success = false;
    double distance = 0.0;
};

struct McSummary {
    int runs = 0;
    int successes = 0;
    double success_rate = 0.0;
    // Distance statistics and the histogram cover successful episodes.
    double mean_distance = std::numeric_limits<double>::quiet_NaN();
    double median_distance = std::numeric_limits<double>::quiet_NaN();
    double std_distance = std::numeric_limits<double>::quiet_NaN();
    double mean_ratio = std::numeric_limits<double>::quiet_NaN();  // to the shortest path
    double shortest_path = 0.0;
    double bin_width = 250.0;
    struct Bin {
        double lo = 0.0;
        double hi = 0.0;
        long count = 0;
    };
    std::vector<Bin> histogram;
};

inline McSummary summarize_outcomes(std::span<const EpisodeOutcome> outcomes,
                                    double shortest_path, double bin_width = 250.0) {
    if (outcomes.empty()) throw std::runtime_error("summarize: no episodes");
    if (!(bin_width > 0.0)) throw std::invalid_argument("summarize: bin width must be positive");
    McSummary s;
    s.runs = static_cast<int>(outcomes.size());
    s.shortest_path = shortest_path;
    s.bin_width = bin_width;

    std::vector<double> dist;
    for (const auto& o : outcomes)
        if (o.success) dist.push_back(o.distance);
    s.successes = static_cast<int>(dist.size());
    s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.runs);
    if (dist.empty()) return s;

    std::sort(dist.begin(), dist.end());
    double acc = 0.0;
    for (double d : dist) acc += d;
    s.mean_distance = acc / static_cast<double>(dist.size());
    const std::size_t n = dist.size();
    s.median_distance = n % 2 ? dist[n / 2] : 0.5 * (dist[n / 2 - 1] + dist[n / 2]);
    if (n > 1) {
        double sq = 0.0;
        for (double d : dist) sq += (d - s.mean_distance) * (d - s.mean_distance);
        s.std_distance = std::sqrt(sq / static_cast<double>(n - 1));
    } else {
        s.std_distance = 0.0;
    }
    s.mean_ratio = s.mean_distance / shortest_path;

    const long lo_bin = static_cast<long>(std::floor(dist.front() / bin_width));
    const long hi_bin = static_cast<long>(std::floor(dist.back() / bin_width));
    s.histogram.reserve(static_cast<std::size_t>(hi_bin - lo_bin + 1));
    for (long b = lo_bin; b <= hi_bin; ++b)
        s.histogram.push_back({b * bin_width, (b + 1) * bin_width, 0});
    for (double d : dist)
        ++s.histogram[static_cast<std::size_t>(static_cast<long>(std::floor(d / bin_width)) -
                                               lo_bin)]
              .count;
    return s;
}

inline McSummary summarize(std::span<const EpisodeLog> logs, double bin_width = 250.0) {
    if (logs.empty()) throw std::runtime_error("summarize: no episodes");
    std::vector<EpisodeOutcome> out;
    out.reserve(logs.size());
    for (const auto& l : logs) out.push_back({l.success, l.distance_traveled});
    return summarize_outcomes(out, logs.front().shortest_path, bin_width);
}

/// Independent episodes with per-episode seeds derived from the master seed.
/// Episodes may run on several threads; results are merged in episode-index
/// order, so the summary never depends on the thread count.
inline McSummary monte_carlo(const Scenario& scenario, const SeekerConfig& cfg, Backend backend,
                             int n_runs, std::uint64_t master_seed, bool with_stage1,
                             int threads = 0, double bin_width = 250.0) {
    if (n_runs < 1) throw std::invalid_argument("monte_carlo: need at least one run");
    Scenario sc = scenario;
    sc.validate();
    ensure_calibrated(sc);  // one calibration shared by the whole batch

    std::vector<EpisodeOutcome> out(static_cast<std::size_t>(n_runs));
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, n_runs);

    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_runs) return;
            EpisodeOptions opt;
            opt.backend = backend;
            opt.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i), Stream::Episode);
            opt.with_stage1 = with_stage1;
            opt.keep_records = false;
            const EpisodeLog log = run_episode(sc, cfg, opt);
            out[static_cast<std::size_t>(i)] = {log.success, log.distance_traveled};
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return summarize_outcomes(out, sc.shortest_path(), bin_width);
}

/// Iterate the analytic error recursion k_max times; trace[0] is the start.
inline std::vector<double> convergence_trace(double theta_err0, double delta, int k_max) {
    if (k_max < 0) throw std::invalid_argument("convergence_trace: negative step count");
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(k_max) + 1);
    trace.push_back(wrap_angle(theta_err0));
    for (int k = 0; k < k_max; ++k) trace.push_back(error_step(trace.back(), delta));
    return trace;
}

}  // namespace dopseek
