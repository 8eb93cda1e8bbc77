// SPDX-License-Identifier: Apache-2.0
//
// Least-squares fitting of the analytic element model to sampled reflection
// data (typically circuit sweeps), and CSV I/O for the sample sets.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "irs/analytic.hpp"
#include "irs/circuit.hpp"
#include "irs/common.hpp"
#include "irs/simplex.hpp"

namespace irs {

struct FitSample {
    double center_phase = 0.0;
    double frequency = 0.0;
    double observed_phase = 0.0;
    double observed_amplitude = 0.0;
};

struct FitOptions {
    double amplitude_weight = 4.0;
    int restarts = 5;
    int evaluations_per_restart = 20000;
    /// Relative spread of the random restart points around `init`.
    double restart_spread = 0.1;
    std::uint64_t seed = 1;
};

struct CurveError {
    double center_phase = 0.0;
    double max_phase_error = 0.0;     ///< wrapped, radians
    double max_amplitude_error = 0.0;
};

struct FitReport {
    double initial_objective = 0.0;
    double objective = 0.0;
    bool no_improvement = false;
    int evaluations = 0;
    std::vector<CurveError> curves;

    double worst_phase_error() const {
        double w = 0.0;
        for (const auto& c : curves) w = std::max(w, c.max_phase_error);
        return w;
    }
    double worst_amplitude_error() const {
        double w = 0.0;
        for (const auto& c : curves) w = std::max(w, c.max_amplitude_error);
        return w;
    }
};

struct FitResult {
    ModelParams params;
    FitReport report;
};

/// The fitted parameters violate the positive-dip constraint.
class ConstraintViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline double fit_objective(const ModelParams& m, std::span<const FitSample> samples, double amplitude_weight) {
    double sum = 0.0;
    for (const auto& s : samples) {
        const double dp = wrap_phase(model_phase(m, s.center_phase, s.frequency) - s.observed_phase);
        const double da = model_amplitude_raw(m, s.center_phase, s.frequency) - s.observed_amplitude;
        sum += dp * dp + amplitude_weight * da * da;
    }
    return sum;
}

/// Per-center-phase worst errors of `m` against `samples`, in ascending
/// center-phase order. Amplitudes are compared after clamping.
inline std::vector<CurveError> curve_errors(const ModelParams& m, std::span<const FitSample> samples) {
    std::map<double, CurveError> by_curve;
    for (const auto& s : samples) {
        auto& c = by_curve[s.center_phase];
        c.center_phase = s.center_phase;
        c.max_phase_error = std::max(
            c.max_phase_error, wrapped_distance(model_phase(m, s.center_phase, s.frequency), s.observed_phase));
        c.max_amplitude_error = std::max(
            c.max_amplitude_error,
            std::abs(model_amplitude(m, s.center_phase, s.frequency) - s.observed_amplitude));
    }
    std::vector<CurveError> out;
    for (const auto& [_, c] : by_curve) out.push_back(c);
    return out;
}

namespace detail {

inline void check_fit_samples(std::span<const FitSample> samples) {
    require(samples.size() >= 50, "fit_model: need at least 50 samples");
    std::set<double> phases, freqs;
    for (const auto& s : samples) {
        require(std::isfinite(s.center_phase) && std::isfinite(s.frequency) && std::isfinite(s.observed_phase) &&
                    std::isfinite(s.observed_amplitude),
                "fit_model: non-finite sample");
        require(s.observed_amplitude >= 0.0 && s.observed_amplitude <= 1.0, "fit_model: amplitude outside [0, 1]");
        phases.insert(s.center_phase);
        freqs.insert(s.frequency);
    }
    require(phases.size() >= 3, "fit_model: need at least 3 distinct center phases");
    require(freqs.size() >= 20, "fit_model: need at least 20 distinct frequencies");
}

}  // namespace detail

/// Fits the seven model constants by simplex descent with random restarts
/// around `init`. Never returns a worse objective than `init`.
inline FitResult fit_model(std::span<const FitSample> samples, const ModelParams& init, const FitOptions& opts = {}) {
    detail::check_fit_samples(samples);
    init.validate();
    detail::require(opts.restarts >= 1, "fit_model: restarts must be positive");

    const auto x0 = init.to_array();
    auto objective = [&](const std::vector<double>& x) {
        std::array<double, ModelParams::kCount> a{};
        std::copy(x.begin(), x.end(), a.begin());
        return fit_objective(ModelParams::from_array(a), samples, opts.amplitude_weight);
    };

    // Start points are drawn up front so the result does not depend on the
    // order in which restarts finish.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(-opts.restart_spread, opts.restart_spread);
    std::vector<std::vector<double>> starts;
    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<double> s(x0.begin(), x0.end());
        if (r > 0)
            for (auto& v : s) v *= 1.0 + jitter(rng);
        starts.push_back(std::move(s));
    }

    SimplexOptions sopts;
    sopts.max_evaluations = opts.evaluations_per_restart;

    std::vector<std::future<SimplexResult>> runs;
    for (const auto& s : starts) {
        runs.push_back(std::async(std::launch::async, [&, s] {
            std::vector<double> step(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) step[i] = std::abs(s[i]) > 1e-8 ? 0.1 * std::abs(s[i]) : 1e-3;
            return nelder_mead(objective, s, step, sopts);
        }));
    }

    FitResult result{init, {}};
    result.report.initial_objective = fit_objective(init, samples, opts.amplitude_weight);
    SimplexResult best;
    for (auto& run : runs) {
        SimplexResult r = run.get();
        result.report.evaluations += r.evaluations;
        if (r.value < best.value) best = std::move(r);
    }

    if (!(best.value < result.report.initial_objective)) {
        result.report.objective = result.report.initial_objective;
        result.report.no_improvement = true;
    } else {
        std::array<double, ModelParams::kCount> a{};
        std::copy(best.x.begin(), best.x.end(), a.begin());
        result.params = ModelParams::from_array(a);
        result.report.objective = best.value;
        if (!result.params.dip_positive()) throw ConstraintViolation("fit_model: fitted amplitude dip is not positive");
    }
    result.report.curves = curve_errors(result.params, samples);
    return result;
}

/// Samples of the circuit reflection on `f_grid` for each target center
/// phase; each target is realized via solve_capacitance at `f_c`.
inline std::vector<FitSample> circuit_samples(const CircuitParams& circuit, std::span<const double> center_phases,
                                              double f_c, std::span<const double> f_grid) {
    std::vector<FitSample> out;
    for (double x : center_phases) {
        const double c = solve_capacitance(circuit, x, f_c).capacitance;
        for (const auto& pt : sweep_reflection(circuit, c, f_grid))
            out.push_back({x, pt.frequency, pt.reflection.phase, pt.reflection.amplitude});
    }
    return out;
}

/// Samples of the analytic model itself (clamped amplitude).
inline std::vector<FitSample> model_samples(const ModelParams& m, std::span<const double> center_phases,
                                            std::span<const double> f_grid) {
    std::vector<FitSample> out;
    for (double x : center_phases)
        for (double f : f_grid) out.push_back({x, f, wrap_phase(model_phase(m, x, f)), model_amplitude(m, x, f)});
    return out;
}

inline constexpr const char* kFitSampleHeader = "center_phase_rad,freq_hz,phase_rad,amplitude";

inline void write_fit_samples(std::ostream& os, std::span<const FitSample> samples) {
    os << kFitSampleHeader << '\n';
    os.precision(17);
    for (const auto& s : samples)
        os << s.center_phase << ',' << s.frequency << ',' << s.observed_phase << ',' << s.observed_amplitude << '\n';
}

inline std::vector<FitSample> read_fit_samples(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("fit samples: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kFitSampleHeader) throw InvalidArgument("fit samples: unexpected header '" + line + "'");

    std::vector<FitSample> out;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::array<double, 4> v{};
        std::string cell;
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(fields, cell, ',')) throw InvalidArgument("fit samples: short row " + std::to_string(row));
            try {
                std::size_t used = 0;
                v[i] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw InvalidArgument("fit samples: bad number '" + cell + "' on row " + std::to_string(row));
            }
        }
        if (std::getline(fields, cell, ',')) throw InvalidArgument("fit samples: extra column on row " + std::to_string(row));
        out.push_back({v[0], v[1], v[2], v[3]});
    }
    return out;
}

}  // namespace irs
