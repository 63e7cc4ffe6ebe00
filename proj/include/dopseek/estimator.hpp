// SPDX-License-Identifier: Apache-2.0
//
// Single-tone frequency estimation: zero-padded DFT, two-sided grid peak,
// quadratic interpolation on the neighboring magnitudes. Plus the abstract
// measurement model used by the synthesis-free simulation backend.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "dopseek/common.hpp"
#include "dopseek/fft.hpp"
#include "dopseek/rng.hpp"

namespace dopseek {

/// One slot's measurement pair.
struct Measurement {
    double omega = 0.0;   // frequency estimate, rad/s
    double phi = 0.0;     // bearing reading, rad
    long slot_index = 0;
};

/// Magnitudes of the length-n_fft DFT of the zero-padded capture.
inline std::vector<double> spectrum(std::span<const cdouble> samples, int n_fft) {
    if (n_fft < 1) throw std::invalid_argument("spectrum: DFT length must be positive");
    if (samples.size() > static_cast<std::size_t>(n_fft))
        throw std::invalid_argument("spectrum: more samples than DFT bins");
    const auto bins = dft(samples, static_cast<std::size_t>(n_fft));
    std::vector<double> mag(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) mag[i] = std::sqrt(std::norm(bins[i]));
    return mag;
}

/// Signed frequency (rad/s) of DFT bin k on the two-sided grid (-Nyquist, Nyquist].
inline double bin_omega(int bin, double t_s, int n_fft) {
    const int k = bin <= n_fft / 2 ? bin : bin - n_fft;
    return kTwoPi * k / (t_s * n_fft);
}

/// Quadratic-fit refinement of a grid peak from the three neighboring
/// spectral magnitudes; the fractional offset is at most half a bin at a
/// strict maximum. A flat triple falls back to the grid frequency.
inline double quad_interp(double m_prev, double m_peak, double m_next, int peak_bin,
                          double t_s, int n_fft) {
    const double w0 = bin_omega(peak_bin, t_s, n_fft);
    const double denom = 2.0 * (m_prev + m_next - 2.0 * m_peak);
    if (denom == 0.0) return w0;
    const double offset_bins = (m_prev - m_next) / denom;
    return w0 + offset_bins * kTwoPi / (t_s * n_fft);
}

/// Frequency estimate for one capture: grid argmax over signed frequencies
/// (ties to the lowest bin), refined with circularly adjacent neighbors.
inline double estimate_frequency(std::span<const cdouble> samples, double t_s, int n_fft) {
    const auto mag = spectrum(samples, n_fft);
    const auto it = std::max_element(mag.begin(), mag.end());
    const int peak = static_cast<int>(it - mag.begin());
    const int prev = (peak + n_fft - 1) % n_fft;
    const int next = (peak + 1) % n_fft;
    double w = quad_interp(mag[prev], mag[peak], mag[next], peak, t_s, n_fft);
    // a half-bin overshoot at the +Nyquist edge aliases to the negative side
    const double nyq = kPi / t_s;
    if (w > nyq) w -= 2.0 * nyq;
    if (w <= -nyq) w += 2.0 * nyq;
    return w;
}

/// Bearing reading: true heading plus Gaussian sensor noise, wrapped to (-pi, pi].
inline double measure_bearing(double true_phi, double sigma_phi, Rng& rng) {
    if (sigma_phi < 0.0) throw std::invalid_argument("measure_bearing: negative sigma");
    return wrap_angle(true_phi + sigma_phi * rng.normal());
}

/// Measurement model that bypasses signal synthesis: independent Gaussian
/// noises added to the true frequency and bearing. Draws happen even at
/// zero sigma so stream positions do not depend on the noise settings.
inline Measurement measure_abstract(double true_omega, double true_phi, double sigma_omega,
                                    double sigma_phi, Rng& rng, long slot_index = 0) {
    if (sigma_omega < 0.0 || sigma_phi < 0.0)
        throw std::invalid_argument("measure_abstract: negative sigma");
    Measurement m;
    m.omega = true_omega + sigma_omega * rng.normal();
    m.phi = wrap_angle(true_phi + sigma_phi * rng.normal());
    m.slot_index = slot_index;
    return m;
}

}  // namespace dopseek
