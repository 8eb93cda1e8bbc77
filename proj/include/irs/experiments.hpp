// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo experiment runners: circuit-vs-model validation, rate
// versus transmit power, rate versus element count and a single-drop
// convergence trace. Every runner returns a plain table; the CSV writers
// below turn those into plot-ready files.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "irs/analytic.hpp"
#include "irs/channel.hpp"
#include "irs/circuit.hpp"
#include "irs/common.hpp"
#include "irs/fit.hpp"
#include "irs/optimizer.hpp"

namespace irs {

enum class Scenario { model_validation, rate_vs_power, rate_vs_elements, convergence_trace };

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::model_validation: return "model-validation";
        case Scenario::rate_vs_power: return "rate-vs-power";
        case Scenario::rate_vs_elements: return "rate-vs-elements";
        case Scenario::convergence_trace: return "convergence-trace";
    }
    return "?";
}

/// Malformed or invalid experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

inline Scenario parse_scenario(const std::string& name) {
    for (Scenario s : {Scenario::model_validation, Scenario::rate_vs_power, Scenario::rate_vs_elements,
                       Scenario::convergence_trace})
        if (to_string(s) == name) return s;
    throw ConfigError("unknown scenario '" + name + "'");
}

struct ValidationSettings {
    double f_min = 2.3e9;
    double f_max = 2.5e9;
    int points = 201;
    std::vector<double> center_phases_deg{0.0, 60.0, -60.0, 120.0, -120.0};
};

struct ExperimentConfig {
    Scenario scenario = Scenario::rate_vs_power;
    SystemConfig system;
    CircuitParams circuit;
    ModelParams model;
    int codebook_bits = 3;
    std::vector<double> power_dbm_sweep{-10, -5, 0, 5, 10, 15, 20, 25, 30};
    std::vector<int> elements_sweep{16, 32, 64};
    int n_drops = 100;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 0;  ///< 0: hardware concurrency
    OptimizerOptions optimizer;
    ValidationSettings validation;

    void validate() const {
        auto check = [](bool ok, const std::string& msg) {
            if (!ok) throw ConfigError(msg);
        };
        try {
            system.validate();
            circuit.validate();
            model.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
        check(codebook_bits >= 1 && codebook_bits <= 8, "codebook_bits must be in [1, 8]");
        check(n_drops >= 1, "n_drops must be at least 1");
        check(threads >= 0, "threads must be non-negative");
        check(!power_dbm_sweep.empty(), "power sweep must not be empty");
        check(!elements_sweep.empty(), "element sweep must not be empty");
        for (double p : power_dbm_sweep) check(std::isfinite(p), "power sweep values must be finite");
        for (int n : elements_sweep) check(n >= 0, "element counts must be non-negative");
        check(optimizer.epsilon > 0 && optimizer.max_sweeps >= 1 && optimizer.max_outer >= 1,
              "optimizer limits must be positive");
        check(validation.points >= 1 && validation.f_min > 0 && validation.f_max >= validation.f_min,
              "validation grid is invalid");
        check(!validation.center_phases_deg.empty(), "validation center phases must not be empty");
    }
};

/// Full-size setup: 128 elements, 64 subcarriers over 100 MHz.
inline void apply_full_scale(ExperimentConfig& cfg) {
    cfg.system.n_elements = 128;
    cfg.system.n_subcarriers = 64;
    cfg.system.bandwidth = 100e6;
}

// ---------------------------------------------------------------------------
// Config file (INI, nested sections)

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
    std::vector<T> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        std::istringstream cell(item);
        T v{};
        cell >> v;
        if (cell.fail() || !cell.eof()) throw ConfigError("bad list entry '" + item + "' for " + key);
        out.push_back(v);
    }
    return out;
}

class ConfigReader {
public:
    explicit ConfigReader(const boost::property_tree::ptree& tree) : tree_(tree) {}

    template <class T>
    void get(const std::string& path, T& target) {
        seen_.insert(path);
        const auto node = tree_.get_optional<std::string>(path);
        if (!node) return;
        std::istringstream is(*node);
        T v{};
        is >> v;
        if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("bad value '" + *node + "' for " + path);
        target = v;
    }

    void get_string(const std::string& path, std::string& target) {
        seen_.insert(path);
        if (const auto node = tree_.get_optional<std::string>(path)) target = *node;
    }

    template <class T>
    void get_list(const std::string& path, std::vector<T>& target) {
        seen_.insert(path);
        if (const auto node = tree_.get_optional<std::string>(path)) target = parse_list<T>(*node, path);
    }

    void reject_unknown() const {
        for (const auto& [key, child] : tree_) {
            if (child.empty()) {
                if (!seen_.count(key)) throw ConfigError("unknown key '" + key + "'");
                continue;
            }
            for (const auto& [sub, _] : child)
                if (!seen_.count(key + "." + sub)) throw ConfigError("unknown key '" + key + "." + sub + "'");
        }
    }

private:
    const boost::property_tree::ptree& tree_;
    std::set<std::string> seen_;
};

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& is) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    ExperimentConfig cfg;
    detail::ConfigReader r(tree);

    std::string scenario = to_string(cfg.scenario);
    r.get_string("scenario", scenario);
    cfg.scenario = parse_scenario(scenario);
    r.get("seed", cfg.seed);
    r.get("n_drops", cfg.n_drops);
    r.get("codebook_bits", cfg.codebook_bits);
    r.get("threads", cfg.threads);
    r.get_string("out", cfg.out);

    auto& s = cfg.system;
    r.get("system.n_elements", s.n_elements);
    r.get("system.n_subcarriers", s.n_subcarriers);
    r.get("system.bandwidth_hz", s.bandwidth);
    r.get("system.center_frequency_hz", s.center_frequency);
    double noise_dbm = watts_to_dbm(s.noise_variance);
    r.get("system.noise_power_dbm", noise_dbm);
    s.noise_variance = dbm_to_watts(noise_dbm);
    double power_dbm = watts_to_dbm(s.max_power);
    r.get("system.power_dbm", power_dbm);
    s.max_power = dbm_to_watts(power_dbm);
    r.get("system.distance_ap_irs_m", s.d_ap_irs);
    r.get("system.distance_irs_user_m", s.d_irs_user);
    r.get("system.ref_attenuation_db", s.ref_attenuation_db);
    r.get("system.exponent_ap_irs", s.exp_ap_irs);
    r.get("system.exponent_irs_user", s.exp_irs_user);
    r.get("system.exponent_ap_user", s.exp_ap_user);
    r.get("system.n_taps", s.n_taps);
    r.get("system.tap_spacing_s", s.tap_spacing);

    auto& c = cfg.circuit;
    r.get("circuit.l1_h", c.l1);
    r.get("circuit.l2_h", c.l2);
    r.get("circuit.r_ohm", c.r);
    r.get("circuit.z0_ohm", c.z0);
    r.get("circuit.c_min_f", c.c_min);
    r.get("circuit.c_max_f", c.c_max);

    auto& m = cfg.model;
    r.get("model.alpha1", m.alpha1);
    r.get("model.alpha2", m.alpha2);
    r.get("model.alpha3", m.alpha3);
    r.get("model.alpha4", m.alpha4);
    r.get("model.beta1", m.beta1);
    r.get("model.beta2", m.beta2);
    r.get("model.beta3", m.beta3);

    r.get_list("sweep.power_dbm", cfg.power_dbm_sweep);
    r.get_list("sweep.elements", cfg.elements_sweep);

    r.get("optimizer.epsilon_bps_hz", cfg.optimizer.epsilon);
    r.get("optimizer.max_sweeps", cfg.optimizer.max_sweeps);
    r.get("optimizer.max_outer", cfg.optimizer.max_outer);
    std::string init = "align";
    r.get_string("optimizer.init", init);
    if (init == "align") {
        cfg.optimizer.init = InitMode::align;
    } else if (init == "random") {
        cfg.optimizer.init = InitMode::random;
    } else {
        throw ConfigError("optimizer.init must be 'align' or 'random'");
    }

    r.get("validation.f_min_hz", cfg.validation.f_min);
    r.get("validation.f_max_hz", cfg.validation.f_max);
    r.get("validation.points", cfg.validation.points);
    r.get_list("validation.center_phases_deg", cfg.validation.center_phases_deg);

    r.reject_unknown();
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

// ---------------------------------------------------------------------------
// Model validation

struct ValidationPoint {
    double frequency = 0.0;
    double circuit_phase = 0.0;
    double circuit_amplitude = 0.0;
    double model_phase = 0.0;
    double model_amplitude = 0.0;
};

struct ValidationCurve {
    double target_phase_deg = 0.0;
    double capacitance = 0.0;
    std::optional<std::string> error;  ///< set when the target is unreachable
    std::vector<ValidationPoint> points;
    double max_phase_error = 0.0;      ///< wrapped, radians
    double max_amplitude_error = 0.0;
};

struct ValidationReport {
    std::vector<ValidationCurve> curves;
};

inline ValidationReport run_model_validation(const ExperimentConfig& cfg) {
    const auto grid = linspace(cfg.validation.f_min, cfg.validation.f_max, cfg.validation.points);
    ValidationReport report;
    for (double deg : cfg.validation.center_phases_deg) {
        ValidationCurve curve;
        curve.target_phase_deg = deg;
        const double x = wrap_phase(deg_to_rad(deg));
        try {
            curve.capacitance = solve_capacitance(cfg.circuit, x, cfg.system.center_frequency).capacitance;
        } catch (const UnreachablePhase& e) {
            curve.capacitance = e.best_capacitance;
            curve.error = e.what();
            report.curves.push_back(std::move(curve));
            continue;
        }
        for (const auto& pt : sweep_reflection(cfg.circuit, curve.capacitance, grid)) {
            ValidationPoint v{pt.frequency, pt.reflection.phase, pt.reflection.amplitude,
                              wrap_phase(model_phase(cfg.model, x, pt.frequency)),
                              model_amplitude(cfg.model, x, pt.frequency)};
            curve.max_phase_error = std::max(curve.max_phase_error, wrapped_distance(v.model_phase, v.circuit_phase));
            curve.max_amplitude_error =
                std::max(curve.max_amplitude_error, std::abs(v.model_amplitude - v.circuit_amplitude));
            curve.points.push_back(v);
        }
        report.curves.push_back(std::move(curve));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Monte Carlo drops

struct Drop {
    double user_angle = 0.0;
    std::uint64_t channel_seed = 0;
};

/// The user angle and channel seed of drop `index`; a pure function of the
/// experiment seed so every sweep point sees the same drops.
inline Drop make_drop(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);
    Drop d;
    d.user_angle = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
    d.channel_seed = rng();
    return d;
}

struct DropRates {
    double practical = 0.0;  ///< designed and evaluated with the practical model
    double ideal = 0.0;      ///< designed with the ideal model, evaluated with the practical one
    double no_irs = 0.0;
};

inline DropRates run_drop(const SystemConfig& system, const ModelParams& model, const PhaseCodebook& cb,
                          const OptimizerOptions& opts, const Drop& drop) {
    const ChannelRealization ch = generate_channels(system, drop.user_angle, drop.channel_seed);
    OptimizerOptions o = opts;
    o.record_elements = false;
    DropRates r;
    r.practical = alternating_optimize(ch, PracticalModel{model}, cb, system.noise_variance, system.max_power, o).rate;
    const JointResult ideal = ideal_design(ch, model, cb, system.noise_variance, system.max_power, o);
    r.ideal = evaluate_design(ch, ideal.state, system.noise_variance, system.max_power);
    r.no_irs = no_irs_rate(ch, system.noise_variance, system.max_power);
    return r;
}

/// Evaluates `work(i)` for i in [0, count) on up to `threads` workers and
/// returns the results in index order.
template <class F>
auto parallel_map(int count, int threads, F&& work) -> std::vector<decltype(work(0))> {
    using R = decltype(work(0));
    std::vector<R> out(count);
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) out[i] = work(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) out[i] = work(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

inline std::vector<DropRates> run_drops(const SystemConfig& system, const ExperimentConfig& cfg) {
    const PhaseCodebook cb = codebook(cfg.codebook_bits);
    return parallel_map(cfg.n_drops, cfg.threads,
                        [&](int i) { return run_drop(system, cfg.model, cb, cfg.optimizer, make_drop(cfg.seed, i)); });
}

struct RateRow {
    std::string sweep_var;
    double sweep_value = 0.0;
    std::string scheme;
    double mean_rate = 0.0;
    double std_rate = 0.0;
    int n_drops = 0;
    std::uint64_t seed = 0;
};

struct Summary {
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation
};

inline Summary summarize(const std::vector<double>& v) {
    Summary s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

namespace detail {

inline void append_scheme_rows(std::vector<RateRow>& rows, const std::string& var, double value,
                               const std::vector<DropRates>& drops, std::uint64_t seed) {
    const std::pair<const char*, double DropRates::*> schemes[] = {
        {"practical", &DropRates::practical}, {"ideal", &DropRates::ideal}, {"no_irs", &DropRates::no_irs}};
    for (const auto& [name, field] : schemes) {
        std::vector<double> v;
        v.reserve(drops.size());
        for (const auto& d : drops) v.push_back(d.*field);
        const Summary s = summarize(v);
        rows.push_back({var, value, name, s.mean, s.std, static_cast<int>(drops.size()), seed});
    }
}

}  // namespace detail

inline std::vector<RateRow> run_rate_vs_power(const ExperimentConfig& cfg) {
    std::vector<RateRow> rows;
    for (double p_dbm : cfg.power_dbm_sweep) {
        SystemConfig sys = cfg.system;
        sys.max_power = dbm_to_watts(p_dbm);
        detail::append_scheme_rows(rows, "power_dbm", p_dbm, run_drops(sys, cfg), cfg.seed);
    }
    return rows;
}

inline std::vector<RateRow> run_rate_vs_elements(const ExperimentConfig& cfg) {
    std::vector<RateRow> rows;
    for (int n : cfg.elements_sweep) {
        SystemConfig sys = cfg.system;
        sys.n_elements = n;
        detail::append_scheme_rows(rows, "n_elements", n, run_drops(sys, cfg), cfg.seed);
    }
    return rows;
}

/// Practical-model alternating optimization on drop 0 of the seed.
inline OptimizationTrace run_convergence_trace(const ExperimentConfig& cfg) {
    const Drop drop = make_drop(cfg.seed, 0);
    const ChannelRealization ch = generate_channels(cfg.system, drop.user_angle, drop.channel_seed);
    return alternating_optimize(ch, PracticalModel{cfg.model}, codebook(cfg.codebook_bits), cfg.system.noise_variance,
                                cfg.system.max_power, cfg.optimizer)
        .trace;
}

// ---------------------------------------------------------------------------
// CSV output

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

}  // namespace detail

inline void write_validation_csv(std::ostream& os, const ValidationReport& report) {
    os << "target_phase_deg,freq_hz,circuit_phase_rad,circuit_amp,model_phase_rad,model_amp\n";
    for (const auto& c : report.curves)
        for (const auto& p : c.points)
            os << detail::num(c.target_phase_deg) << ',' << detail::num(p.frequency) << ','
               << detail::num(p.circuit_phase) << ',' << detail::num(p.circuit_amplitude) << ','
               << detail::num(p.model_phase) << ',' << detail::num(p.model_amplitude) << '\n';
}

inline void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows) {
    os << "sweep_var,sweep_value,scheme,mean_rate_bps_hz,std_rate,n_drops,seed\n";
    for (const auto& r : rows)
        os << r.sweep_var << ',' << detail::num(r.sweep_value) << ',' << r.scheme << ',' << detail::num(r.mean_rate)
           << ',' << detail::num(r.std_rate) << ',' << r.n_drops << ',' << r.seed << '\n';
}

/// Runs the configured scenario, writes its table to `os` and a short
/// human-readable summary to `log`.
inline void run_experiment(const ExperimentConfig& cfg, std::ostream& os, std::ostream& log) {
    cfg.validate();
    switch (cfg.scenario) {
        case Scenario::model_validation: {
            const ValidationReport report = run_model_validation(cfg);
            write_validation_csv(os, report);
            for (const auto& c : report.curves) {
                log << "center phase " << c.target_phase_deg << " deg: ";
                if (c.error) {
                    log << "UNREACHABLE (" << *c.error << ")\n";
                } else {
                    log << "C = " << c.capacitance * 1e12 << " pF, max phase error " << rad_to_deg(c.max_phase_error)
                        << " deg, max amplitude error " << c.max_amplitude_error << '\n';
                }
            }
            break;
        }
        case Scenario::rate_vs_power:
            write_rate_csv(os, run_rate_vs_power(cfg));
            break;
        case Scenario::rate_vs_elements:
            write_rate_csv(os, run_rate_vs_elements(cfg));
            break;
        case Scenario::convergence_trace: {
            const OptimizationTrace trace = run_convergence_trace(cfg);
            write_trace_csv(os, trace);
            log << "sweeps " << trace.sweeps << ", outer iterations " << trace.outer_iterations
                << (trace.converged ? ", converged\n" : ", stopped at iteration limit\n");
            break;
        }
    }
}

}  // namespace irs
