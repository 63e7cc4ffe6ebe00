// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles and generators, kept independent of the library code
// paths they are used to check.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace testutil {

using cdouble = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Direct O(N*n) DFT, evaluating every twiddle from scratch.
inline std::vector<cdouble> naive_dft(std::span<const cdouble> x, std::size_t n) {
    std::vector<cdouble> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cdouble acc{0.0, 0.0};
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double ang = -kTwoPi * static_cast<double>(k) * static_cast<double>(j) /
                               static_cast<double>(n);
            acc += x[j] * cdouble{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

/// Complex tone with per-sample phase evaluation (no incremental rotation).
inline std::vector<cdouble> make_tone(int n, double t_s, double f_hz, double amp = 1.0,
                                      double phase0 = 0.0) {
    std::vector<cdouble> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] = std::polar(amp, kTwoPi * f_hz * i * t_s + phase0);
    return x;
}

/// Peak of a densely zero-padded spectrum, in Hz on the two-sided grid.
/// Ground truth for interpolation bias: the dense grid pins the peak to
/// within half of one dense bin.
template <typename DftFn>
inline double dense_peak_hz(std::span<const cdouble> samples, double t_s, std::size_t n_dense,
                            DftFn&& dft_fn) {
    const auto bins = dft_fn(samples, n_dense);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double m = std::abs(bins[i]);
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    const auto k = static_cast<long long>(best);
    const long long n = static_cast<long long>(n_dense);
    const long long signed_k = k <= n / 2 ? k : k - n;
    return static_cast<double>(signed_k) / (t_s * static_cast<double>(n_dense));
}

/// Pearson chi-square statistic for observed counts against equal expectations.
inline double chi_square_uniform(std::span<const long> counts, double total) {
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (long c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

}  // namespace testutil
