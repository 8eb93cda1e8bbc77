// SPDX-License-Identifier: Apache-2.0
//
// Shared scalar types, phase helpers and the error hierarchy used across the
// IRS simulator headers.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace irs {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violation on an argument.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical routine produced a non-finite or otherwise unusable result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Wraps an angle into the half-open interval [-pi, pi).
inline double wrap_phase(double angle) {
    double wrapped = angle - kTwoPi * std::round(angle / kTwoPi);
    // round() leaves the result in [-pi, pi]; fold the closed end.
    if (wrapped >= kPi) wrapped -= kTwoPi;
    if (wrapped < -kPi) wrapped += kTwoPi;
    return wrapped;
}

/// Magnitude of the shortest signed rotation from `b` to `a`.
inline double wrapped_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// dBm to watts.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace irs
