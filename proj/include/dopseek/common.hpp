// SPDX-License-Identifier: Apache-2.0
//
// Shared numeric helpers: angle wrapping, dB conversions, 2D vectors.

#pragma once

#include <cmath>
#include <numbers>

namespace dopseek {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Normalize an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a <= -kPi)
        a += kTwoPi;
    else if (a > kPi)
        a -= kTwoPi;
    return a;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
};

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Angle of a vector in the world frame, in (-pi, pi].
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }

}  // namespace dopseek
