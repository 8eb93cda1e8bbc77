// SPDX-License-Identifier: Apache-2.0
//
// Closed-form phase/amplitude/frequency model of an IRS element and the
// uniformly quantized center-frequency phase codebook.
//
// The element is parameterized by the phase x it applies at the carrier.
// Its resonance sits at F1(x) GHz; the phase follows a flipped arctangent of
// slope F2(x) around it and the amplitude a flipped Lorentzian dip:
//
//   theta(x, f) = -2 atan(F2(x) (f/1e9 - F1(x)))
//   A(x, f)     = 1 - (a4 x + b3) / (((f/1e9 - F1(x)) / 0.05)^2 + 4)
//   F1(x)       = a1 tan(x/3) + a2 sin(x) + b1
//   F2(x)       = a3 x + b2
//
// x is in radians.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "irs/common.hpp"

namespace irs {

struct ModelParams {
    double alpha1 = 0.2;
    double alpha2 = -0.015;
    double alpha3 = -0.75;
    double alpha4 = -0.05;
    double beta1 = 2.4;
    double beta2 = 11.02;
    double beta3 = 1.65;

    static constexpr std::size_t kCount = 7;

    std::array<double, kCount> to_array() const { return {alpha1, alpha2, alpha3, alpha4, beta1, beta2, beta3}; }

    static ModelParams from_array(const std::array<double, kCount>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    }

    /// True when the amplitude dip depth a4 x + b3 is positive on [-pi, pi].
    /// The expression is linear in x, so the endpoints decide.
    bool dip_positive() const { return alpha4 * -kPi + beta3 > 0.0 && alpha4 * kPi + beta3 > 0.0; }

    bool finite() const {
        const auto v = to_array();
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    }

    void validate() const {
        detail::require(finite(), "ModelParams: non-finite parameter");
        detail::require(dip_positive(), "ModelParams: alpha4*x + beta3 must be positive on [-pi, pi)");
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Resonance location in GHz.
inline double f1(const ModelParams& m, double center_phase) {
    return m.alpha1 * std::tan(center_phase / 3.0) + m.alpha2 * std::sin(center_phase) + m.beta1;
}

/// Phase slope around resonance (per GHz).
inline double f2(const ModelParams& m, double center_phase) { return m.alpha3 * center_phase + m.beta2; }

inline double model_phase(const ModelParams& m, double center_phase, double f) {
    return -2.0 * std::atan(f2(m, center_phase) * (f / 1e9 - f1(m, center_phase)));
}

/// Amplitude before clamping; smooth in every argument, used by the fitter.
inline double model_amplitude_raw(const ModelParams& m, double center_phase, double f) {
    const double detune = (f / 1e9 - f1(m, center_phase)) / 0.05;
    return 1.0 - (m.alpha4 * center_phase + m.beta3) / (detune * detune + 4.0);
}

inline double model_amplitude(const ModelParams& m, double center_phase, double f) {
    return std::clamp(model_amplitude_raw(m, center_phase, f), 0.0, 1.0);
}

inline Complex model_reflection(const ModelParams& m, double center_phase, double f) {
    return std::polar(model_amplitude(m, center_phase, f), model_phase(m, center_phase, f));
}

struct PhaseCodebook {
    int bits = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// The 2^bits phases 2*pi*b/2^bits - pi, b = 0..2^bits-1.
inline PhaseCodebook codebook(int bits) {
    detail::require(bits >= 1 && bits <= 8, "codebook: bits must be in [1, 8]");
    PhaseCodebook cb;
    cb.bits = bits;
    const int levels = 1 << bits;
    cb.values.resize(levels);
    for (int b = 0; b < levels; ++b) cb.values[b] = kTwoPi * b / levels - kPi;
    return cb;
}

}  // namespace irs
