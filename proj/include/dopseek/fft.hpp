// SPDX-License-Identifier: Apache-2.0
//
// Exact DFT of a zero-padded block: iterative radix-2 transform for
// power-of-two lengths, direct summation otherwise.

#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dopseek/common.hpp"

namespace dopseek {

using cdouble = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

// Per-thread twiddle tables, one per transform size.
inline const std::vector<cdouble>& twiddles_for(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::vector<cdouble>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<cdouble> w(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
            w[k] = {std::cos(ang), std::sin(ang)};
        }
        it = cache.emplace(n, std::move(w)).first;
    }
    return it->second;
}

// In-place iterative Cooley-Tukey; a.size() must be a power of two.
inline void fft_radix2(std::vector<cdouble>& a) {
    const std::size_t n = a.size();
    if (n < 2) return;
    const auto& w = twiddles_for(n);
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j |= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdouble u = a[i + k];
                const cdouble t = a[i + k + len / 2] * w[k * stride];
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
            }
        }
    }
}

inline std::vector<cdouble> dft_direct(std::span<const cdouble> x, std::size_t n) {
    std::vector<cdouble> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        const cdouble step(std::cos(ang), std::sin(ang));
        cdouble w(1.0, 0.0);
        cdouble acc(0.0, 0.0);
        for (const cdouble& xi : x) {
            acc += xi * w;
            w *= step;
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace detail

/// Length-n DFT of the input zero-padded to n samples.
inline std::vector<cdouble> dft(std::span<const cdouble> x, std::size_t n) {
    if (x.size() > n) throw std::invalid_argument("dft: input longer than transform length");
    if (is_pow2(n)) {
        std::vector<cdouble> a(n, cdouble{});
        std::copy(x.begin(), x.end(), a.begin());
        detail::fft_radix2(a);
        return a;
    }
    return detail::dft_direct(x, n);
}

}  // namespace dopseek
