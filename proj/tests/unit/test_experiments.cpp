// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "irs/experiments.hpp"

namespace {

using irs::ExperimentConfig;
using irs::Scenario;

ExperimentConfig parse(const std::string& text) {
    std::istringstream is(text);
    return irs::parse_config(is);
}

ExperimentConfig small_config(Scenario s) {
    ExperimentConfig cfg;
    cfg.scenario = s;
    cfg.system.n_elements = 8;
    cfg.system.n_subcarriers = 8;
    cfg.n_drops = 6;
    cfg.seed = 17;
    cfg.power_dbm_sweep = {0.0, 20.0};
    cfg.elements_sweep = {0, 4, 8};
    return cfg;
}

std::string run_to_string(const ExperimentConfig& cfg) {
    std::ostringstream os, log;
    irs::run_experiment(cfg, os, log);
    return os.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

TEST(Config, Defaults) {
    const auto cfg = parse("");
    EXPECT_EQ(cfg.scenario, Scenario::rate_vs_power);
    EXPECT_EQ(cfg.system.n_elements, 32);
    EXPECT_EQ(cfg.system.n_subcarriers, 16);
    EXPECT_EQ(cfg.codebook_bits, 3);
    EXPECT_EQ(cfg.power_dbm_sweep.size(), 9u);
    EXPECT_NEAR(irs::watts_to_dbm(cfg.system.noise_variance), -104.0, 1e-9);
}

TEST(Config, ParsesSections) {
    const auto cfg = parse(
        "scenario = rate-vs-elements\n"
        "seed = 99\n"
        "n_drops = 12\n"
        "[system]\n"
        "n_subcarriers = 32\n"
        "bandwidth_hz = 200e6\n"
        "power_dbm = 15\n"
        "[sweep]\n"
        "elements = 8, 16\n"
        "[optimizer]\n"
        "init = random\n"
        "max_outer = 5\n");
    EXPECT_EQ(cfg.scenario, Scenario::rate_vs_elements);
    EXPECT_EQ(cfg.seed, 99u);
    EXPECT_EQ(cfg.n_drops, 12);
    EXPECT_EQ(cfg.system.n_subcarriers, 32);
    EXPECT_DOUBLE_EQ(cfg.system.bandwidth, 200e6);
    EXPECT_NEAR(irs::watts_to_dbm(cfg.system.max_power), 15.0, 1e-12);
    EXPECT_EQ(cfg.elements_sweep, (std::vector<int>{8, 16}));
    EXPECT_EQ(cfg.optimizer.init, irs::InitMode::random);
    EXPECT_EQ(cfg.optimizer.max_outer, 5);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse("bogus = 1\n"), irs::ConfigError);
    EXPECT_THROW(parse("[system]\nn_elementz = 4\n"), irs::ConfigError);
    EXPECT_THROW(parse("n_drops = many\n"), irs::ConfigError);
    EXPECT_THROW(parse("n_drops = 0\n"), irs::ConfigError);
    EXPECT_THROW(parse("scenario = fig7\n"), irs::ConfigError);
    EXPECT_THROW(parse("[system]\nn_subcarriers = 0\n"), irs::ConfigError);
    EXPECT_THROW(parse("[sweep]\npower_dbm = 1, x\n"), irs::ConfigError);
    EXPECT_THROW(parse("[optimizer]\ninit = greedy\n"), irs::ConfigError);
    EXPECT_THROW(parse("[model]\nalpha4 = 1.0\n"), irs::ConfigError);
    EXPECT_THROW(parse("[system\n"), irs::ConfigError);
    EXPECT_THROW(irs::load_config("/nonexistent/config.ini"), irs::ConfigError);
}

TEST(Config, FullScale) {
    ExperimentConfig cfg;
    irs::apply_full_scale(cfg);
    EXPECT_EQ(cfg.system.n_elements, 128);
    EXPECT_EQ(cfg.system.n_subcarriers, 64);
}

TEST(Drops, AreSeededAndDistinct) {
    const auto a = irs::make_drop(5, 3);
    const auto b = irs::make_drop(5, 3);
    EXPECT_EQ(a.user_angle, b.user_angle);
    EXPECT_EQ(a.channel_seed, b.channel_seed);
    EXPECT_NE(irs::make_drop(5, 4).channel_seed, a.channel_seed);
    EXPECT_NE(irs::make_drop(6, 3).channel_seed, a.channel_seed);
    EXPECT_GE(a.user_angle, 0.0);
    EXPECT_LT(a.user_angle, irs::kTwoPi);
}

TEST(Drops, ParallelMapKeepsOrder) {
    const auto v = irs::parallel_map(100, 4, [](int i) { return i * i; });
    for (int i = 0; i < 100; ++i) EXPECT_EQ(v[i], i * i);
    EXPECT_THROW(irs::parallel_map(10, 3,
                                   [](int i) -> int {
                                       if (i == 7) throw irs::NumericalError("boom");
                                       return i;
                                   }),
                 irs::NumericalError);
}

TEST(Summary, SampleStatistics) {
    const auto s = irs::summarize({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.std, std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_EQ(irs::summarize({7.0}).std, 0.0);
}

TEST(Scenario, ModelValidationCsv) {
    auto cfg = small_config(Scenario::model_validation);
    cfg.validation.points = 11;
    const auto rows = csv_rows(run_to_string(cfg));
    ASSERT_EQ(rows.size(), 1u + 5u * 11u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"target_phase_deg", "freq_hz", "circuit_phase_rad", "circuit_amp",
                                                  "model_phase_rad", "model_amp"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 6u);
        const double amp = std::stod(rows[i][3]);
        EXPECT_GE(amp, 0.0);
        EXPECT_LE(amp, 1.0);
    }
}

TEST(Scenario, ModelValidationFlagsUnreachableTargets) {
    auto cfg = small_config(Scenario::model_validation);
    cfg.validation.center_phases_deg = {0.0, -180.0};
    const auto report = irs::run_model_validation(cfg);
    ASSERT_EQ(report.curves.size(), 2u);
    EXPECT_FALSE(report.curves[0].error);
    EXPECT_TRUE(report.curves[1].error);
    EXPECT_TRUE(report.curves[1].points.empty());
}

TEST(Scenario, RateVsPowerCsv) {
    const auto cfg = small_config(Scenario::rate_vs_power);
    const auto rows = csv_rows(run_to_string(cfg));
    ASSERT_EQ(rows.size(), 1u + 2u * 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"sweep_var", "sweep_value", "scheme", "mean_rate_bps_hz", "std_rate",
                                                  "n_drops", "seed"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][0], "power_dbm");
        EXPECT_GE(std::stod(rows[i][3]), 0.0);
        EXPECT_GE(std::stod(rows[i][4]), 0.0);
        EXPECT_EQ(rows[i][5], "6");
        EXPECT_EQ(rows[i][6], "17");
    }
}

TEST(Scenario, ZeroElementsCollapseSchemes) {
    const auto rows = irs::run_rate_vs_elements(small_config(Scenario::rate_vs_elements));
    ASSERT_EQ(rows.size(), 9u);
    EXPECT_EQ(rows[0].sweep_value, 0.0);
    EXPECT_EQ(rows[0].mean_rate, rows[1].mean_rate);
    EXPECT_EQ(rows[0].mean_rate, rows[2].mean_rate);
    for (const auto& r : rows) EXPECT_GE(r.mean_rate, 0.0);
}

TEST(Scenario, ConvergenceTraceIsMonotone) {
    const auto cfg = small_config(Scenario::convergence_trace);
    const auto trace = irs::run_convergence_trace(cfg);
    const auto obj = trace.objectives();
    ASSERT_GE(obj.size(), 2u);
    for (std::size_t i = 1; i < obj.size(); ++i) EXPECT_GE(obj[i], obj[i - 1] - 1e-12);
    EXPECT_EQ(csv_rows(run_to_string(cfg)).size(), obj.size() + 1);
}

TEST(Reproducibility, ByteIdenticalAcrossRunsAndThreadCounts) {
    auto cfg = small_config(Scenario::rate_vs_power);
    cfg.threads = 1;
    const std::string serial = run_to_string(cfg);
    cfg.threads = 4;
    const std::string parallel = run_to_string(cfg);
    EXPECT_EQ(serial, parallel);
    EXPECT_EQ(parallel, run_to_string(cfg));
    cfg.seed = 18;
    EXPECT_NE(parallel, run_to_string(cfg));
}

}  // namespace
