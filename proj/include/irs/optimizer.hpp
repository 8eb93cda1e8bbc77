// SPDX-License-Identifier: Apache-2.0
//
// Joint power allocation and discrete reflect beamforming for an IRS-aided
// OFDM link.
//
// The objective is the subcarrier-averaged rate
//
//   R = (1/K) sum_k log2(1 + p_k |h_r,k^H Phi_k g_k + h_d,k|^2 / sigma^2)
//
// where Phi_k holds each element's reflection coefficient at subcarrier k.
// Each element is controlled only through its center-frequency phase, drawn
// from a codebook; a reflection model maps (phase, frequency) to the
// coefficient the element actually applies.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irs/analytic.hpp"
#include "irs/channel.hpp"
#include "irs/common.hpp"

namespace irs {

// ---------------------------------------------------------------------------
// Reflection models

template <class M>
concept ReflectionModel = requires(const M& m, double center_phase, double f) {
    { m.coefficient(center_phase, f) } -> std::convertible_to<Complex>;
};

/// Frequency-dependent coefficients from the analytic element model.
struct PracticalModel {
    ModelParams params;
    Complex coefficient(double center_phase, double f) const { return model_reflection(params, center_phase, f); }
};

/// Unit amplitude and the same phase at every frequency.
struct IdealModel {
    Complex coefficient(double center_phase, double /*f*/) const { return std::polar(1.0, center_phase); }
};

/// Coefficient of every codebook entry at every subcarrier (|S| x K).
template <ReflectionModel M>
Eigen::MatrixXcd reflection_table(const M& model, const PhaseCodebook& cb, std::span<const double> freqs) {
    Eigen::MatrixXcd t(static_cast<Eigen::Index>(cb.size()), static_cast<Eigen::Index>(freqs.size()));
    for (std::size_t s = 0; s < cb.size(); ++s)
        for (std::size_t k = 0; k < freqs.size(); ++k) t(s, k) = model.coefficient(cb[s], freqs[k]);
    return t;
}

// ---------------------------------------------------------------------------
// State

struct BeamformingState {
    std::vector<int> indices;  ///< codebook index per element
    Eigen::MatrixXcd phi;      ///< N x K coefficients, cached from the table

    int elements() const { return static_cast<int>(indices.size()); }

    static BeamformingState from_indices(std::vector<int> idx, const Eigen::MatrixXcd& table) {
        BeamformingState s;
        s.phi.resize(static_cast<Eigen::Index>(idx.size()), table.cols());
        s.indices = std::move(idx);
        for (int n = 0; n < s.elements(); ++n) s.phi.row(n) = table.row(s.indices[n]);
        return s;
    }

    void set(int n, int index, const Eigen::MatrixXcd& table) {
        indices[n] = index;
        phi.row(n) = table.row(index);
    }
};

/// True when every cached coefficient equals a fresh model evaluation.
template <ReflectionModel M>
bool cache_coherent(const BeamformingState& s, const M& model, const PhaseCodebook& cb,
                    std::span<const double> freqs) {
    if (s.phi.rows() != s.elements() || s.phi.cols() != static_cast<Eigen::Index>(freqs.size())) return false;
    for (int n = 0; n < s.elements(); ++n)
        for (std::size_t k = 0; k < freqs.size(); ++k)
            if (s.phi(n, k) != model.coefficient(cb[s.indices[n]], freqs[k])) return false;
    return true;
}

struct PowerAllocation {
    std::vector<double> p;

    double total() const {
        double t = 0.0;
        for (double v : p) t += v;
        return t;
    }

    static PowerAllocation uniform(double total, int k_count) {
        return {std::vector<double>(k_count, total / k_count)};
    }
};

struct TraceRow {
    std::string stage;  ///< init | element | sweep | power
    int iteration = 0;
    double objective = 0.0;
};

struct OptimizationTrace {
    std::vector<TraceRow> rows;
    int sweeps = 0;
    int outer_iterations = 0;
    bool converged = false;

    std::vector<double> objectives() const {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r.objective);
        return v;
    }

    void add(std::string stage, int iteration, double objective) {
        rows.push_back({std::move(stage), iteration, objective});
    }
};

inline void write_trace_csv(std::ostream& os, const OptimizationTrace& trace) {
    os << "stage,iteration,objective\n";
    os.precision(15);
    for (const auto& r : trace.rows) os << r.stage << ',' << r.iteration << ',' << r.objective << '\n';
}

enum class InitMode { align, random };

struct OptimizerOptions {
    double epsilon = 1e-4;  ///< bits/s/Hz
    int max_sweeps = 20;
    int max_outer = 30;
    InitMode init = InitMode::align;
    std::uint64_t seed = 0;  ///< used by InitMode::random
    bool record_elements = true;
};

// ---------------------------------------------------------------------------
// Objective

/// conj(h_r) .* g, N x K.
inline Eigen::MatrixXcd cascade(const ChannelRealization& ch) { return ch.h_irs_user.conjugate().cwiseProduct(ch.g_ap_irs); }

inline Complex effective_gain(const ChannelRealization& ch, const BeamformingState& beam, int k) {
    detail::require(k >= 0 && k < ch.subcarriers(), "effective_gain: subcarrier out of range");
    Complex sum = ch.h_direct[k];
    for (int n = 0; n < ch.elements(); ++n) sum += std::conj(ch.h_irs_user(n, k)) * beam.phi(n, k) * ch.g_ap_irs(n, k);
    return sum;
}

inline Eigen::VectorXcd effective_gains(const Eigen::MatrixXcd& casc, const Eigen::VectorXcd& direct,
                                        const Eigen::MatrixXcd& phi) {
    Eigen::VectorXcd g = direct;
    if (casc.rows() > 0) g += casc.cwiseProduct(phi).colwise().sum().transpose();
    return g;
}

inline Eigen::VectorXcd effective_gains(const ChannelRealization& ch, const BeamformingState& beam) {
    return effective_gains(cascade(ch), ch.h_direct, beam.phi);
}

inline double average_rate(const Eigen::VectorXcd& gains, std::span<const double> p, double noise_variance) {
    detail::require(noise_variance > 0.0, "average_rate: noise variance must be positive");
    detail::require(static_cast<std::size_t>(gains.size()) == p.size(), "average_rate: shape mismatch");
    double sum = 0.0;
    for (Eigen::Index k = 0; k < gains.size(); ++k) sum += std::log2(1.0 + p[k] * std::norm(gains[k]) / noise_variance);
    return sum / static_cast<double>(gains.size());
}

inline double average_rate(const ChannelRealization& ch, const BeamformingState& beam, const PowerAllocation& power,
                           double noise_variance) {
    return average_rate(effective_gains(ch, beam), power.p, noise_variance);
}

// ---------------------------------------------------------------------------
// Water-filling

/// Thrown when every subcarrier has zero gain.
class UnallocatablePower : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// p_k = max(0, mu - sigma^2/g_k) with sum p_k = P. The water level is
/// bracketed by bisection, then solved in closed form on the active set.
inline PowerAllocation water_filling(std::span<const double> gains, double noise_variance, double total_power) {
    detail::require(noise_variance > 0.0, "water_filling: noise variance must be positive");
    detail::require(total_power > 0.0, "water_filling: power must be positive");
    detail::require(!gains.empty(), "water_filling: no subcarriers");

    const std::size_t k_count = gains.size();
    std::vector<double> floor(k_count, std::numeric_limits<double>::infinity());
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_count; ++k) {
        detail::require(gains[k] >= 0.0 && std::isfinite(gains[k]), "water_filling: gains must be finite and >= 0");
        if (gains[k] > 0.0) {
            floor[k] = noise_variance / gains[k];
            lowest = std::min(lowest, floor[k]);
        }
    }
    if (!std::isfinite(lowest)) throw UnallocatablePower("water_filling: all subcarrier gains are zero");

    auto poured = [&](double mu) {
        double t = 0.0;
        for (double fl : floor) t += std::max(0.0, mu - fl);
        return t;
    };
    double lo = lowest, hi = lowest + total_power * static_cast<double>(k_count);
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (poured(mid) > total_power ? hi : lo) = mid;
    }
    double mu = 0.5 * (lo + hi);

    double floor_sum = 0.0;
    int active = 0;
    for (double fl : floor)
        if (fl < mu) {
            floor_sum += fl;
            ++active;
        }
    if (active > 0) {
        const double exact = (total_power + floor_sum) / active;
        bool consistent = true;
        for (double fl : floor) consistent = consistent && ((fl < mu) == (fl < exact));
        if (consistent) mu = exact;
    }

    PowerAllocation out{std::vector<double>(k_count, 0.0)};
    for (std::size_t k = 0; k < k_count; ++k) out.p[k] = std::max(0.0, mu - floor[k]);
    return out;
}

inline PowerAllocation water_filling(const Eigen::VectorXcd& gains, double noise_variance, double total_power) {
    std::vector<double> g(gains.size());
    for (Eigen::Index k = 0; k < gains.size(); ++k) g[k] = std::norm(gains[k]);
    return water_filling(g, noise_variance, total_power);
}

/// Largest violation of the water-filling optimality conditions.
inline double water_filling_kkt_residual(std::span<const double> gains, std::span<const double> p,
                                         double noise_variance) {
    double mu = 0.0;
    for (std::size_t k = 0; k < gains.size(); ++k)
        if (p[k] > 0.0) mu = std::max(mu, p[k] + noise_variance / gains[k]);
    double worst = 0.0;
    for (std::size_t k = 0; k < gains.size(); ++k) {
        if (p[k] > 0.0) {
            worst = std::max(worst, std::abs(mu - noise_variance / gains[k] - p[k]));
        } else if (gains[k] > 0.0) {
            worst = std::max(worst, std::max(0.0, mu - noise_variance / gains[k]));
        }
        worst = std::max(worst, std::max(0.0, -p[k]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Reflect beamforming

/// Initial codebook indices. `align` picks, per element, the entry that best
/// co-phases the cascaded path with the direct path at the middle subcarrier.
inline std::vector<int> initial_indices(const ChannelRealization& ch, const PhaseCodebook& cb,
                                        const OptimizerOptions& opts) {
    const int n_el = ch.elements();
    std::vector<int> idx(n_el, 0);
    if (n_el == 0) return idx;
    if (opts.init == InitMode::random) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(cb.size()) - 1);
        for (auto& i : idx) i = pick(rng);
        return idx;
    }
    const int kc = (ch.subcarriers() - 1) / 2;
    const Complex direct_share = ch.h_direct[kc] / static_cast<double>(n_el);
    for (int n = 0; n < n_el; ++n) {
        const Complex c = std::conj(ch.h_irs_user(n, kc)) * ch.g_ap_irs(n, kc);
        double best = -1.0;
        for (std::size_t s = 0; s < cb.size(); ++s) {
            const double v = std::abs(c * std::polar(1.0, cb[s]) + direct_share);
            if (v > best) {
                best = v;
                idx[n] = static_cast<int>(s);
            }
        }
    }
    return idx;
}

struct ReflectResult {
    BeamformingState state;
    OptimizationTrace trace;
    bool changed = false;  ///< any element moved during the call
};

namespace detail {

/// Cyclic coordinate ascent over codebook entries with `p` fixed. Appends
/// element/sweep rows to `trace`.
inline bool reflect_stage(const Eigen::MatrixXcd& casc, const Eigen::VectorXcd& direct, const Eigen::MatrixXcd& table,
                          std::span<const double> p, double noise_variance, const OptimizerOptions& opts,
                          BeamformingState& state, OptimizationTrace& trace) {
    const int n_el = state.elements();
    const int levels = static_cast<int>(table.rows());
    bool any_change = false;

    auto rate_of = [&](const Eigen::VectorXcd& g) { return average_rate(g, p, noise_variance); };

    Eigen::VectorXcd gains = effective_gains(casc, direct, state.phi);
    double before = rate_of(gains);
    for (int sweep = 0; sweep < opts.max_sweeps && n_el > 0; ++sweep) {
        bool changed = false;
        for (int n = 0; n < n_el; ++n) {
            const Eigen::VectorXcd base = gains - casc.row(n).cwiseProduct(state.phi.row(n)).transpose();
            int best_index = 0;
            double best_rate = -1.0;
            Eigen::VectorXcd best_gains;
            for (int s = 0; s < levels; ++s) {
                Eigen::VectorXcd cand = base + casc.row(n).cwiseProduct(table.row(s)).transpose();
                const double r = rate_of(cand);
                if (r > best_rate) {  // strict: lowest index wins ties
                    best_rate = r;
                    best_index = s;
                    best_gains = std::move(cand);
                }
            }
            if (best_index != state.indices[n]) {
                changed = true;
                state.set(n, best_index, table);
            }
            gains = std::move(best_gains);
            if (opts.record_elements) trace.add("element", n, best_rate);
        }
        ++trace.sweeps;
        // Fresh evaluation keeps incremental rounding from accumulating.
        gains = effective_gains(casc, direct, state.phi);
        const double after = rate_of(gains);
        trace.add("sweep", trace.sweeps, after);
        any_change = any_change || changed;
        const double gain = after - before;
        before = after;
        if (!changed || gain < opts.epsilon) {
            trace.converged = true;
            break;
        }
    }
    if (n_el == 0) trace.converged = true;
    return any_change;
}

}  // namespace detail

/// Algorithm-1 style cyclic coordinate ascent with power held fixed.
template <ReflectionModel M>
ReflectResult reflect_beamforming(const ChannelRealization& ch, const PowerAllocation& power, double noise_variance,
                                  const M& model, const PhaseCodebook& cb, const BeamformingState& init,
                                  const OptimizerOptions& opts = {}) {
    detail::require(noise_variance > 0.0, "reflect_beamforming: noise variance must be positive");
    detail::require(static_cast<int>(power.p.size()) == ch.subcarriers(), "reflect_beamforming: power shape");
    detail::require(init.elements() == ch.elements(), "reflect_beamforming: init shape");
    const Eigen::MatrixXcd table = reflection_table(model, cb, ch.frequencies);
    ReflectResult out{BeamformingState::from_indices(init.indices, table), {}, false};
    const Eigen::MatrixXcd casc = cascade(ch);
    out.trace.add("init", 0, average_rate(effective_gains(casc, ch.h_direct, out.state.phi), power.p, noise_variance));
    out.changed = detail::reflect_stage(casc, ch.h_direct, table, power.p, noise_variance, opts, out.state, out.trace);
    return out;
}

struct JointResult {
    BeamformingState state;
    PowerAllocation power;
    double rate = 0.0;
    OptimizationTrace trace;
};

/// Alternates reflect beamforming (power fixed) and water-filling (beam
/// fixed), starting from uniform power, until a reflect stage leaves the
/// beam unchanged or `max_outer` rounds have run.
template <ReflectionModel M>
JointResult alternating_optimize(const ChannelRealization& ch, const M& model, const PhaseCodebook& cb,
                                 double noise_variance, double total_power, const OptimizerOptions& opts = {},
                                 const std::vector<int>* init = nullptr) {
    detail::require(noise_variance > 0.0, "alternating_optimize: noise variance must be positive");
    detail::require(total_power > 0.0, "alternating_optimize: power must be positive");
    const Eigen::MatrixXcd table = reflection_table(model, cb, ch.frequencies);
    const Eigen::MatrixXcd casc = cascade(ch);

    std::vector<int> start = init ? *init : initial_indices(ch, cb, opts);
    detail::require(static_cast<int>(start.size()) == ch.elements(), "alternating_optimize: init shape");
    for (int i : start) detail::require(i >= 0 && i < static_cast<int>(cb.size()), "alternating_optimize: bad index");

    JointResult out{BeamformingState::from_indices(std::move(start), table),
                    PowerAllocation::uniform(total_power, ch.subcarriers()), 0.0, {}};
    out.rate = average_rate(effective_gains(casc, ch.h_direct, out.state.phi), out.power.p, noise_variance);
    out.trace.add("init", 0, out.rate);

    for (int outer = 1; outer <= opts.max_outer; ++outer) {
        out.trace.converged = false;
        const bool changed =
            detail::reflect_stage(casc, ch.h_direct, table, out.power.p, noise_variance, opts, out.state, out.trace);
        const Eigen::VectorXcd gains = effective_gains(casc, ch.h_direct, out.state.phi);
        out.power = water_filling(gains, noise_variance, total_power);
        const double r = average_rate(gains, out.power.p, noise_variance);
        out.trace.add("power", outer, r);
        out.trace.outer_iterations = outer;
        out.rate = r;
        // A round that leaves every element in place is a fixed point of
        // both half-steps: the water-fill is then a pure function of it.
        if (!changed) {
            out.trace.converged = true;
            break;
        }
    }
    return out;
}

/// Beam designed under the unit-amplitude, frequency-flat assumption, then
/// re-cached with the practical model so it can be evaluated realistically.
inline JointResult ideal_design(const ChannelRealization& ch, const ModelParams& practical, const PhaseCodebook& cb,
                                double noise_variance, double total_power, const OptimizerOptions& opts = {}) {
    JointResult design = alternating_optimize(ch, IdealModel{}, cb, noise_variance, total_power, opts);
    const Eigen::MatrixXcd table = reflection_table(PracticalModel{practical}, cb, ch.frequencies);
    design.state = BeamformingState::from_indices(design.state.indices, table);
    return design;
}

/// Water-filled rate of a fixed beam; the power is re-optimized for the
/// coefficients the beam actually produces.
inline double evaluate_design(const ChannelRealization& ch, const BeamformingState& state, double noise_variance,
                              double total_power) {
    const Eigen::VectorXcd gains = effective_gains(ch, state);
    const PowerAllocation p = water_filling(gains, noise_variance, total_power);
    return average_rate(gains, p.p, noise_variance);
}

/// Water-filled rate over the direct channel alone.
inline double no_irs_rate(const ChannelRealization& ch, double noise_variance, double total_power) {
    const PowerAllocation p = water_filling(ch.h_direct, noise_variance, total_power);
    return average_rate(ch.h_direct, p.p, noise_variance);
}

/// The instance has too many beam configurations to enumerate.
class SearchTooLarge : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct SearchResult {
    BeamformingState state;
    PowerAllocation power;
    double rate = 0.0;
    std::uint64_t configurations = 0;
};

/// Global optimum by enumerating every beam and water-filling each one.
template <ReflectionModel M>
SearchResult exhaustive_search(const ChannelRealization& ch, const M& model, const PhaseCodebook& cb,
                               double noise_variance, double total_power, std::uint64_t limit = 1'000'000) {
    const int n_el = ch.elements();
    const std::uint64_t levels = cb.size();
    std::uint64_t total = 1;
    for (int n = 0; n < n_el; ++n) {
        if (total > limit / levels) {
            std::ostringstream os;
            os << "exhaustive_search: " << levels << "^" << n_el << " configurations exceed the limit of " << limit;
            throw SearchTooLarge(os.str());
        }
        total *= levels;
    }

    const Eigen::MatrixXcd table = reflection_table(model, cb, ch.frequencies);
    const Eigen::MatrixXcd casc = cascade(ch);
    std::vector<int> idx(n_el, 0);
    SearchResult best{{}, {}, -1.0, total};
    Eigen::MatrixXcd phi(n_el, ch.subcarriers());
    for (std::uint64_t c = 0; c < total; ++c) {
        for (int n = 0; n < n_el; ++n) phi.row(n) = table.row(idx[n]);
        const Eigen::VectorXcd gains = effective_gains(casc, ch.h_direct, phi);
        PowerAllocation p = water_filling(gains, noise_variance, total_power);
        const double r = average_rate(gains, p.p, noise_variance);
        if (r > best.rate) {
            best.rate = r;
            best.power = std::move(p);
            best.state = BeamformingState::from_indices(idx, table);
        }
        for (int n = n_el - 1; n >= 0; --n) {  // odometer, last element fastest
            if (++idx[n] < static_cast<int>(levels)) break;
            idx[n] = 0;
        }
    }
    return best;
}

}  // namespace irs
