// SPDX-License-Identifier: Apache-2.0
//
// Equivalent-circuit model of a single varactor-loaded IRS element.
//
// The element is a parallel resonator: the bottom-layer inductance L1 sits in
// parallel with a series branch made of the top-layer inductance L2, the
// varactor capacitance C and the loss resistance R. The reflection
// coefficient follows from the impedance mismatch against free space.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "irs/common.hpp"

namespace irs {

struct CircuitParams {
    double l1 = 2.5e-9;      ///< bottom-layer inductance [H]
    double l2 = 0.7e-9;      ///< top-layer inductance [H]
    double r = 1.0;          ///< loss resistance [ohm]
    double z0 = 377.0;       ///< free-space impedance [ohm]
    double c_min = 0.47e-12; ///< varactor range, low end [F]
    double c_max = 2.35e-12; ///< varactor range, high end [F]

    void validate() const {
        detail::require(l1 > 0.0 && l2 > 0.0, "CircuitParams: inductances must be positive");
        detail::require(r >= 0.0, "CircuitParams: resistance must be non-negative");
        detail::require(z0 > 0.0, "CircuitParams: reference impedance must be positive");
        detail::require(c_min > 0.0 && c_min < c_max, "CircuitParams: need 0 < c_min < c_max");
    }
};

struct PolarReflection {
    double amplitude = 0.0;
    double phase = 0.0;  ///< radians, [-pi, pi)
};

inline PolarReflection to_polar(const Complex& z) { return {std::abs(z), wrap_phase(std::arg(z))}; }

/// The impedance or reflection of the circuit is not a finite number.
class SingularCircuit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// No capacitance in range reaches the requested phase within tolerance.
class UnreachablePhase : public NumericalError {
public:
    UnreachablePhase(double target, double best_c, double best_distance)
        : NumericalError(describe(target, best_c, best_distance)),
          target_phase(target),
          best_capacitance(best_c),
          distance(best_distance) {}

    double target_phase;
    double best_capacitance;
    double distance;

private:
    static std::string describe(double target, double c, double dist) {
        std::ostringstream os;
        os << "phase " << rad_to_deg(target) << " deg unreachable; best C = " << c * 1e12 << " pF misses by "
           << rad_to_deg(dist) << " deg";
        return os.str();
    }
};

/// Reflection sweep failed at a specific frequency.
class SweepError : public NumericalError {
public:
    SweepError(double f, const std::string& what)
        : NumericalError("at " + std::to_string(f) + " Hz: " + what), frequency(f) {}

    double frequency;
};

inline Complex impedance(const CircuitParams& p, double c, double f) {
    detail::require(c > 0.0, "impedance: capacitance must be positive");
    detail::require(f > 0.0, "impedance: frequency must be positive");
    const Complex jw{0.0, kTwoPi * f};
    const Complex series = jw * p.l2 + 1.0 / (jw * c) + p.r;
    const Complex shunt = jw * p.l1;
    const Complex z = shunt * series / (shunt + series);
    if (!is_finite(z)) throw SingularCircuit("impedance is not finite");
    return z;
}

inline Complex reflection_from_impedance(const Complex& z, double z0) {
    const Complex denom = z + z0;
    if (denom == Complex{0.0, 0.0}) throw SingularCircuit("Z = -Z0: reflection coefficient undefined");
    const Complex gamma = (z - z0) / denom;
    if (!is_finite(gamma)) throw SingularCircuit("reflection coefficient is not finite");
    return gamma;
}

inline Complex reflection(const CircuitParams& p, double c, double f) {
    return reflection_from_impedance(impedance(p, c, f), p.z0);
}

struct CapacitanceSolution {
    double capacitance = 0.0;
    double distance = 0.0;  ///< achieved wrapped phase error [rad]
};

struct SolveOptions {
    int grid_points = 512;
    int bisection_steps = 60;
    double tolerance = deg_to_rad(1.0);
};

/// Finds C in [c_min, c_max] whose reflection phase at `f_c` is closest to
/// `target_phase`. Throws UnreachablePhase when the best match is still
/// farther than the tolerance.
inline CapacitanceSolution solve_capacitance(const CircuitParams& p, double target_phase, double f_c,
                                             const SolveOptions& opts = {}) {
    p.validate();
    detail::require(f_c > 0.0, "solve_capacitance: frequency must be positive");
    detail::require(target_phase >= -kPi && target_phase < kPi, "solve_capacitance: target outside [-pi, pi)");
    detail::require(opts.grid_points >= 2, "solve_capacitance: grid needs at least two points");

    auto signed_error = [&](double c) { return wrap_phase(std::arg(reflection(p, c, f_c)) - target_phase); };
    auto at = [&](int i) {
        return i == opts.grid_points - 1 ? p.c_max : p.c_min + (p.c_max - p.c_min) * i / (opts.grid_points - 1);
    };

    std::vector<double> err(opts.grid_points);
    int best = 0;
    for (int i = 0; i < opts.grid_points; ++i) {
        err[i] = signed_error(at(i));
        if (std::abs(err[i]) < std::abs(err[best])) best = i;
    }

    CapacitanceSolution sol{at(best), std::abs(err[best])};

    // Refine on whichever neighbouring cell brackets a genuine sign change.
    // A wrap jump also flips the sign, but then both ends sit near +-pi.
    for (int lo : {best - 1, best}) {
        const int hi = lo + 1;
        if (lo < 0 || hi >= opts.grid_points) continue;
        if (std::signbit(err[lo]) == std::signbit(err[hi])) continue;
        if (std::abs(err[lo]) + std::abs(err[hi]) > kPi) continue;
        double a = at(lo), b = at(hi), ea = err[lo];
        for (int step = 0; step < opts.bisection_steps; ++step) {
            const double mid = 0.5 * (a + b);
            const double em = signed_error(mid);
            if (std::signbit(em) == std::signbit(ea)) {
                a = mid;
                ea = em;
            } else {
                b = mid;
            }
        }
        const double c = 0.5 * (a + b);
        const double d = std::abs(signed_error(c));
        if (d < sol.distance) sol = {c, d};
    }

    if (sol.distance > opts.tolerance) throw UnreachablePhase(target_phase, sol.capacitance, sol.distance);
    return sol;
}

struct SweepPoint {
    double frequency = 0.0;
    PolarReflection reflection;
};

inline std::vector<SweepPoint> sweep_reflection(const CircuitParams& p, double c, std::span<const double> f_grid) {
    std::vector<SweepPoint> out;
    out.reserve(f_grid.size());
    for (double f : f_grid) {
        try {
            out.push_back({f, to_polar(reflection(p, c, f))});
        } catch (const Error& e) {
            throw SweepError(f, e.what());
        }
    }
    return out;
}

/// `count` evenly spaced points over [lo, hi] inclusive.
inline std::vector<double> linspace(double lo, double hi, int count) {
    detail::require(count >= 1, "linspace: count must be positive");
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
    return v;
}

}  // namespace irs
