// SPDX-License-Identifier: Apache-2.0
//
// Source-seeking control law: outlier gating and smoothing of frequency
// values, a circular scan for the initial direction, and perturbation
// feedback updates of the direction estimate, plus the matching analytic
// error recursion.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dopseek/common.hpp"
#include "dopseek/estimator.hpp"
#include "dopseek/world.hpp"

namespace dopseek {

struct SeekerConfig {
    double delta = deg2rad(10.0);  // bearing perturbation, rad
    int M = 20;                    // slots per half-leg
    int smoothing_len = 15;        // moving-average window, slots
    double R_c = 50.0;             // initial-scan circle radius, m
    double f_d_max = 10.0 * 2.0e9 / 2.998e8;  // assumed-known max Doppler, Hz
    double outlier_threshold = 2.0 * kTwoPi * (10.0 * 2.0e9 / 2.998e8);  // rad/s
    bool use_stage1 = true;

    /// Derive the known-constant fields (max Doppler and the gating
    /// threshold of twice its angular value) from the scenario.
    static SeekerConfig from_scenario(const Scenario& sc) {
        SeekerConfig cfg;
        cfg.f_d_max = sc.f_d_max();
        cfg.outlier_threshold = 2.0 * kTwoPi * sc.f_d_max();
        return cfg;
    }

    void validate() const {
        auto fail = [](const char* msg) { throw std::invalid_argument(std::string("seeker: ") + msg); };
        if (!(delta > 0.0 && delta < kPi / 2.0)) fail("delta must be in (0, 90) degrees");
        if (!(delta * std::sin(delta) < 1.0)) fail("delta*sin(delta) must be < 1");
        if (M < 1) fail("M must be >= 1");
        if (smoothing_len < 1) fail("smoothing length must be >= 1");
        if (!(R_c > 0.0)) fail("scan circle radius must be positive");
        if (!(f_d_max > 0.0)) fail("max Doppler must be positive");
        if (!(outlier_threshold > 0.0)) fail("outlier threshold must be positive");
    }
};

/// Gate a new frequency value against the last accepted one: pass it when
/// the jump stays below the threshold, otherwise keep the previous value.
inline double reject_outlier(double omega_new, double omega_prev, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("reject_outlier: threshold must be positive");
    return std::abs(omega_new - omega_prev) < threshold ? omega_new : omega_prev;
}

/// Mean of the most recent `window` values (all of them when fewer).
inline double smooth(std::span<const double> history, int window) {
    if (history.empty()) throw std::invalid_argument("smooth: empty history");
    if (window < 1) throw std::invalid_argument("smooth: window must be >= 1");
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(window), history.size());
    double acc = 0.0;
    for (std::size_t i = history.size() - n; i < history.size(); ++i) acc += history[i];
    return acc / static_cast<double>(n);
}

/// Initial direction from a scan: the bearing paired with the largest
/// frequency value. Ties go to the earliest entry.
inline double stage1_direction(std::span<const std::pair<double, double>> omega_phi) {
    if (omega_phi.empty()) throw std::runtime_error("stage1_direction: no measurements");
    std::size_t best = 0;
    for (std::size_t i = 1; i < omega_phi.size(); ++i)
        if (omega_phi[i].first > omega_phi[best].first) best = i;
    return omega_phi[best].second;
}

/// One perturbation-feedback update from the two half-leg frequency sets.
/// The legs are differenced, so a constant offset common to both cancels;
/// sums are accumulated in index order to keep that cancellation exact.
inline double stage2_update(double theta, std::span<const double> plus_leg,
                            std::span<const double> minus_leg, double delta, double f_d_max) {
    if (plus_leg.size() != minus_leg.size() || plus_leg.empty())
        throw std::runtime_error("stage2_update: leg length mismatch");
    double sum_plus = 0.0;
    double sum_minus = 0.0;
    for (double w : plus_leg) sum_plus += w;
    for (double w : minus_leg) sum_minus += w;
    const double mean_diff = (sum_plus - sum_minus) / static_cast<double>(plus_leg.size());
    return wrap_angle(theta + mean_diff * delta / (kTwoPi * f_d_max));
}

/// Ideal direction-error recursion for a constant perturbation:
/// err' = err - 2 sin(err) sin(delta) delta, wrapped to (-pi, pi].
inline double error_step(double theta_err, double delta) {
    return wrap_angle(theta_err - 2.0 * std::sin(theta_err) * std::sin(delta) * delta);
}

/// Change of the squared error in one ideal step,
/// -4a sin(err) (err - a sin(err)) with a = delta sin(delta); strictly
/// negative for 0 < |err| < pi whenever a < 1.
inline double lyapunov_decrement(double theta_err, double delta) {
    const double a = delta * std::sin(delta);
    const double s = std::sin(theta_err);
    return -4.0 * a * s * (theta_err - a * s);
}

enum class SeekerPhase { Stage1, Stage2Plus, Stage2Minus };

/// Gating outcome for one observed measurement.
struct GateResult {
    double omega_checked = 0.0;
    bool accepted = true;
};

/// Slot-driven protocol state machine. Stage 1 walks one full circle in
/// slot-length chords while collecting gated measurements, then fixes the
/// initial direction at the bearing of the largest smoothed frequency.
/// Stage 2 alternates M-slot legs at +-delta about the current direction
/// and updates it from the leg-mean difference after each pair.
class Seeker {
  public:
    Seeker(const SeekerConfig& cfg, double initial_heading, double slot_duration, double speed)
        : cfg_(cfg), theta_(wrap_angle(initial_heading)) {
        cfg_.validate();
        if (!(slot_duration > 0.0) || !(speed > 0.0))
            throw std::invalid_argument("seeker: slot duration and speed must be positive");
        circle_slots_ = std::max<long>(
            1, static_cast<long>(std::ceil(kTwoPi * cfg_.R_c / (speed * slot_duration))));
        turn_per_slot_ = kTwoPi / static_cast<double>(circle_slots_);
        phase_ = cfg_.use_stage1 ? SeekerPhase::Stage1 : SeekerPhase::Stage2Plus;
    }

    SeekerPhase phase() const { return phase_; }
    bool has_direction() const { return phase_ != SeekerPhase::Stage1; }
    double theta() const { return theta_; }
    long iteration() const { return k_; }
    long circle_slots() const { return circle_slots_; }

    /// Heading to fly for the upcoming slot.
    double next_heading() const {
        switch (phase_) {
            case SeekerPhase::Stage1:
                return wrap_angle(theta_ + static_cast<double>(s1_count_) * turn_per_slot_);
            case SeekerPhase::Stage2Plus:
                return wrap_angle(theta_ + cfg_.delta);
            case SeekerPhase::Stage2Minus:
                return wrap_angle(theta_ - cfg_.delta);
        }
        return theta_;
    }

    /// Feed one slot's measurement; returns the gated frequency value and
    /// whether the raw value was accepted. The gate seeds itself with the
    /// first measurement it sees.
    GateResult observe(const Measurement& m) {
        double checked = m.omega;
        bool accepted = true;
        if (last_accepted_) {
            checked = reject_outlier(m.omega, *last_accepted_, cfg_.outlier_threshold);
            accepted = (checked == m.omega);
        }
        last_accepted_ = checked;

        switch (phase_) {
            case SeekerPhase::Stage1:
                s1_omega_.push_back(checked);
                s1_phi_.push_back(m.phi);
                ++s1_count_;
                if (s1_count_ >= circle_slots_) finish_stage1();
                break;
            case SeekerPhase::Stage2Plus:
                plus_.push_back(checked);
                if (static_cast<long>(plus_.size()) >= cfg_.M) phase_ = SeekerPhase::Stage2Minus;
                break;
            case SeekerPhase::Stage2Minus:
                minus_.push_back(checked);
                if (static_cast<long>(minus_.size()) >= cfg_.M) {
                    theta_ = stage2_update(theta_, plus_, minus_, cfg_.delta, cfg_.f_d_max);
                    ++k_;
                    plus_.clear();
                    minus_.clear();
                    phase_ = SeekerPhase::Stage2Plus;
                }
                break;
        }
        return {checked, accepted};
    }

  private:
    void finish_stage1() {
        // Trailing moving average paired with the bearing at the window
        // center, so the filter delay does not bias the picked direction.
        std::vector<std::pair<double, double>> pairs;
        pairs.reserve(s1_omega_.size());
        for (std::size_t n = 0; n < s1_omega_.size(); ++n) {
            const double sm = smooth(std::span(s1_omega_.data(), n + 1), cfg_.smoothing_len);
            const std::size_t win =
                std::min<std::size_t>(static_cast<std::size_t>(cfg_.smoothing_len), n + 1);
            pairs.emplace_back(sm, s1_phi_[n - (win - 1) / 2]);
        }
        theta_ = wrap_angle(stage1_direction(pairs));
        s1_omega_.clear();
        s1_phi_.clear();
        phase_ = SeekerPhase::Stage2Plus;
    }

    SeekerConfig cfg_;
    SeekerPhase phase_ = SeekerPhase::Stage1;
    double theta_ = 0.0;  // circle start heading during stage 1, direction estimate after
    long k_ = 0;          // completed stage-2 updates
    long circle_slots_ = 0;
    double turn_per_slot_ = 0.0;
    long s1_count_ = 0;
    std::vector<double> s1_omega_, s1_phi_;
    std::vector<double> plus_, minus_;
    std::optional<double> last_accepted_;
};

}  // namespace dopseek
