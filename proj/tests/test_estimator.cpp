// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "dopseek/estimator.hpp"
#include "dopseek/fft.hpp"
#include "dopseek/rng.hpp"
#include "helpers.hpp"

using namespace dopseek;

namespace {
constexpr double kTs = 1e-5;
constexpr int kNfft = 4096;
const double kBinHz = 1.0 / (kTs * kNfft);  // ~24.414 Hz
}  // namespace

TEST_CASE("spectrum", "[estimator]") {
    SECTION("all-zero input gives all-zero magnitudes") {
        const std::vector<cdouble> x(128, cdouble{});
        for (double m : spectrum(x, 256)) CHECK(m == 0.0);
    }
    SECTION("an on-grid tone with N == N_fft peaks only at its bin") {
        const int n = 256, bin = 37;
        const auto x = testutil::make_tone(n, kTs, bin / (kTs * n));
        const auto mag = spectrum(x, n);
        const auto it = std::max_element(mag.begin(), mag.end());
        CHECK(static_cast<int>(it - mag.begin()) == bin);
        CHECK(*it == Approx(n).epsilon(1e-9));
        for (int i = 0; i < n; ++i)
            if (i != bin) CHECK(mag[static_cast<std::size_t>(i)] < 1e-8 * n);
    }
    SECTION("matches a naive DFT on random data") {
        Rng rng(321);
        std::vector<cdouble> x(64);
        for (auto& s : x) s = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto mag = spectrum(x, 256);
        const auto oracle = testutil::naive_dft(x, 256);
        double scale = 0.0;
        for (const auto& b : oracle) scale = std::max(scale, std::abs(b));
        for (std::size_t i = 0; i < mag.size(); ++i)
            CHECK(std::abs(mag[i] - std::abs(oracle[i])) < 1e-9 * scale);
    }
    SECTION("matches a naive DFT at the working size") {
        Rng rng(322);
        std::vector<cdouble> x(1000);
        for (auto& s : x) s = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto mag = spectrum(x, kNfft);
        const auto oracle = testutil::naive_dft(x, kNfft);
        double scale = 0.0;
        for (const auto& b : oracle) scale = std::max(scale, std::abs(b));
        for (std::size_t i = 0; i < mag.size(); ++i)
            CHECK(std::abs(mag[i] - std::abs(oracle[i])) < 1e-9 * scale);
    }
    SECTION("non-power-of-two lengths fall back to the exact direct transform") {
        Rng rng(323);
        std::vector<cdouble> x(40);
        for (auto& s : x) s = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto mag = spectrum(x, 96);
        const auto oracle = testutil::naive_dft(x, 96);
        for (std::size_t i = 0; i < mag.size(); ++i)
            CHECK(mag[i] == Approx(std::abs(oracle[i])).margin(1e-9));
    }
    SECTION("more samples than bins is a configuration error") {
        const std::vector<cdouble> x(300, cdouble{1.0, 0.0});
        CHECK_THROWS_AS(spectrum(x, 256), std::invalid_argument);
    }
}

TEST_CASE("bin_omega covers the signed two-sided grid", "[estimator]") {
    CHECK(bin_omega(0, kTs, kNfft) == 0.0);
    CHECK(bin_omega(1, kTs, kNfft) == Approx(kTwoPi * kBinHz));
    CHECK(bin_omega(kNfft / 2, kTs, kNfft) == Approx(kPi / kTs));          // +Nyquist
    CHECK(bin_omega(kNfft - 1, kTs, kNfft) == Approx(-kTwoPi * kBinHz));   // -1 bin
    CHECK(bin_omega(kNfft / 2 + 1, kTs, kNfft) < 0.0);
}

TEST_CASE("quad_interp", "[estimator]") {
    const double w0 = bin_omega(10, kTs, kNfft);
    const double bin = kTwoPi / (kTs * kNfft);
    SECTION("a symmetric triple needs no correction") {
        CHECK(quad_interp(1.0, 2.0, 1.0, 10, kTs, kNfft) == Approx(w0));
    }
    SECTION("a right-heavy triple moves half a bin up") {
        CHECK(quad_interp(1.0, 2.0, 2.0, 10, kTs, kNfft) == Approx(w0 + 0.5 * bin));
    }
    SECTION("a left-heavy triple moves half a bin down") {
        CHECK(quad_interp(2.0, 2.0, 1.0, 10, kTs, kNfft) == Approx(w0 - 0.5 * bin));
    }
    SECTION("a flat triple falls back to the grid frequency") {
        CHECK(quad_interp(2.0, 2.0, 2.0, 10, kTs, kNfft) == Approx(w0));
    }
}

TEST_CASE("interpolation offset stays within half a bin at a strict peak", "[estimator][property]") {
    Rng rng(777);
    const double bin = kTwoPi / (kTs * kNfft);
    for (int i = 0; i < 500; ++i) {
        const double peak = rng.uniform(1.0, 2.0);
        const double a = rng.uniform(0.0, peak);
        const double b = rng.uniform(0.0, peak);
        if (a >= peak || b >= peak) continue;
        const double w = quad_interp(a, peak, b, 100, kTs, kNfft);
        CHECK(std::abs(w - bin_omega(100, kTs, kNfft)) <= 0.5 * bin * (1.0 + 1e-12));
    }
}

TEST_CASE("estimate_frequency is exact for on-grid tones", "[estimator]") {
    const int n = 1000;
    for (int k : {0, 40, 100, -60, -122}) {
        const double f = k * kBinHz;
        const auto x = testutil::make_tone(n, kTs, f, 1.0, 0.77);
        const double est_hz = estimate_frequency(x, kTs, kNfft) / kTwoPi;
        CHECK(std::abs(est_hz - f) < 1e-6);
    }
}

TEST_CASE("estimate_frequency handles off-grid tones within 2 Hz", "[estimator]") {
    SECTION("the worked example at 1 kHz") {
        const auto x = testutil::make_tone(1000, kTs, 1000.0);
        const double est_hz = estimate_frequency(x, kTs, kNfft) / kTwoPi;
        CHECK(std::abs(est_hz - 1000.0) < 2.0);
        // oracle: a 64x denser grid pins the true peak location
        const double dense_hz = testutil::dense_peak_hz(
            x, kTs, 64 * kNfft, [](std::span<const cdouble> s, std::size_t m) { return dft(s, m); });
        CHECK(std::abs(dense_hz - 1000.0) < 0.4);
    }
    SECTION("random off-grid tones") {
        Rng rng(888);
        for (int i = 0; i < 25; ++i) {
            const double f = rng.uniform(-3000.0, 3000.0);
            const auto x = testutil::make_tone(1000, kTs, f, 1.0, rng.angle());
            CHECK(std::abs(estimate_frequency(x, kTs, kNfft) / kTwoPi - f) < 2.0);
        }
    }
}

TEST_CASE("estimate RMS error falls as SNR rises", "[estimator]") {
    Rng rng(999);
    const int n = 1000;
    const double f_true = 850.0;
    auto rms_at_snr = [&](double snr_db) {
        const double sigma = std::sqrt(db_to_linear(-snr_db) / 2.0);
        double acc = 0.0;
        const int trials = 300;
        for (int t = 0; t < trials; ++t) {
            auto x = testutil::make_tone(n, kTs, f_true, 1.0, rng.angle());
            for (auto& s : x) s += cdouble{sigma * rng.normal(), sigma * rng.normal()};
            const double err = estimate_frequency(x, kTs, kNfft) / kTwoPi - f_true;
            acc += err * err;
        }
        return std::sqrt(acc / trials);
    };
    const double rms0 = rms_at_snr(0.0);
    const double rms10 = rms_at_snr(10.0);
    const double rms20 = rms_at_snr(20.0);
    CHECK(rms0 > rms10);
    CHECK(rms10 > rms20);
}

TEST_CASE("conjugating a capture negates the estimate", "[estimator][property]") {
    Rng rng(1001);
    for (int i = 0; i < 20; ++i) {
        const double f = rng.uniform(-3000.0, 3000.0);
        auto x = testutil::make_tone(1000, kTs, f, 1.0, rng.angle());
        const double w = estimate_frequency(x, kTs, kNfft);
        for (auto& s : x) s = std::conj(s);
        const double w_conj = estimate_frequency(x, kTs, kNfft);
        CHECK(std::abs(w_conj + w) <= kTwoPi * kBinHz);
    }
}

TEST_CASE("measure_bearing", "[estimator]") {
    SECTION("zero sigma is the identity up to wrapping") {
        Rng rng(1);
        CHECK(measure_bearing(0.7, 0.0, rng) == 0.7);
        CHECK(measure_bearing(kPi + 0.2, 0.0, rng) == Approx(-kPi + 0.2));
    }
    SECTION("negative sigma is rejected") {
        Rng rng(1);
        CHECK_THROWS_AS(measure_bearing(0.0, -1.0, rng), std::invalid_argument);
    }
    SECTION("values near the wrap stay inside (-pi, pi]") {
        Rng rng(2);
        for (int i = 0; i < 10000; ++i) {
            const double b = measure_bearing(kPi, 0.05, rng);
            CHECK(b > -kPi);
            CHECK(b <= kPi);
        }
    }
    SECTION("circular mean matches the true bearing") {
        Rng rng(3);
        const double phi = 2.0, sigma = 0.3;
        const int n = 100000;
        double sx = 0.0, sy = 0.0;
        for (int i = 0; i < n; ++i) {
            const double b = measure_bearing(phi, sigma, rng);
            sx += std::cos(b);
            sy += std::sin(b);
        }
        const double circ_mean = std::atan2(sy, sx);
        CHECK(std::abs(wrap_angle(circ_mean - phi)) < 3.0 * sigma / std::sqrt(double(n)));
    }
}

TEST_CASE("measure_abstract", "[estimator]") {
    SECTION("zero sigmas pass the truth through") {
        Rng rng(1);
        const auto m = measure_abstract(123.4, 0.5, 0.0, 0.0, rng, 9);
        CHECK(m.omega == 123.4);
        CHECK(m.phi == 0.5);
        CHECK(m.slot_index == 9);
    }
    SECTION("sample variances match the configured sigmas within 3%") {
        Rng rng(2);
        const double s_w = 2.0, s_p = 0.2;
        const int n = 100000;
        double sw = 0.0, sww = 0.0, sp = 0.0, spp = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto m = measure_abstract(10.0, 0.0, s_w, s_p, rng);
            sw += m.omega;
            sww += m.omega * m.omega;
            sp += m.phi;
            spp += m.phi * m.phi;
        }
        const double var_w = (sww - sw * sw / n) / (n - 1);
        const double var_p = (spp - sp * sp / n) / (n - 1);
        CHECK(var_w == Approx(s_w * s_w).epsilon(0.03));
        CHECK(var_p == Approx(s_p * s_p).epsilon(0.03));
    }
    SECTION("frequency and bearing noises are uncorrelated") {
        Rng rng(3);
        const int n = 100000;
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            const auto m = measure_abstract(0.0, 0.0, 1.0, 1.0, rng);
            a[static_cast<std::size_t>(i)] = m.omega;
            b[static_cast<std::size_t>(i)] = m.phi;
        }
        double ma = 0.0, mb = 0.0;
        for (int i = 0; i < n; ++i) {
            ma += a[static_cast<std::size_t>(i)];
            mb += b[static_cast<std::size_t>(i)];
        }
        ma /= n;
        mb /= n;
        double cov = 0.0, va = 0.0, vb = 0.0;
        for (int i = 0; i < n; ++i) {
            const double da = a[static_cast<std::size_t>(i)] - ma;
            const double db = b[static_cast<std::size_t>(i)] - mb;
            cov += da * db;
            va += da * da;
            vb += db * db;
        }
        CHECK(std::abs(cov / std::sqrt(va * vb)) < 0.01);
    }
}
