// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "irs/analytic.hpp"
#include "irs/circuit.hpp"

namespace {

using irs::ModelParams;
constexpr double kPi = irs::kPi;

TEST(Analytic, ResonanceLocation) {
    const ModelParams m;
    EXPECT_DOUBLE_EQ(irs::f1(m, 0.0), 2.4);
    EXPECT_NEAR(irs::f1(m, 2 * kPi / 3), 2.5548295451786895, 1e-12);
    EXPECT_NEAR(irs::f1(m, -kPi), 2.0535898384862246, 1e-12);
}

TEST(Analytic, Slope) {
    const ModelParams m;
    EXPECT_DOUBLE_EQ(irs::f2(m, 0.0), 11.02);
    EXPECT_NEAR(irs::f2(m, 2 * kPi / 3), 9.449203673205103, 1e-12);
    EXPECT_NEAR(irs::f2(m, -kPi), 13.376194490192344, 1e-12);
}

TEST(Analytic, Phase) {
    const ModelParams m;
    EXPECT_NEAR(irs::model_phase(m, 0.0, 2.4e9), 0.0, 1e-12);
    EXPECT_NEAR(irs::model_phase(m, 0.0, 2.5e9), -1.6677706876342782, 1e-12);
    EXPECT_NEAR(irs::rad_to_deg(irs::model_phase(m, 0.0, 2.5e9)), -95.6, 0.05);
    EXPECT_NEAR(irs::model_phase(m, 2 * kPi / 3, 2.4e9), 1.9424337983525652, 1e-12);
}

TEST(Analytic, Amplitude) {
    const ModelParams m;
    EXPECT_NEAR(irs::model_amplitude(m, 0.0, 2.4e9), 0.5875, 1e-12);
    EXPECT_NEAR(irs::model_amplitude(m, 0.0, 2.5e9), 0.79375, 1e-12);
    EXPECT_GE(irs::model_amplitude(m, 0.0, 3.4e9), 0.995);
}

TEST(Analytic, AmplitudeIsClampedButRawIsNot) {
    ModelParams m;
    m.beta3 = 6.0;  // dip deeper than the Lorentzian floor of 4
    EXPECT_LT(irs::model_amplitude_raw(m, 0.0, 2.4e9), 0.0);
    EXPECT_EQ(irs::model_amplitude(m, 0.0, 2.4e9), 0.0);
}

TEST(Analytic, Reflection) {
    const ModelParams m;
    const irs::Complex at_center = irs::model_reflection(m, 0.0, 2.4e9);
    EXPECT_NEAR(at_center.real(), 0.5875, 1e-12);
    EXPECT_NEAR(at_center.imag(), 0.0, 1e-12);
    const irs::Complex edge = irs::model_reflection(m, 0.0, 2.5e9);
    EXPECT_NEAR(std::abs(edge), 0.79375, 1e-12);
    EXPECT_NEAR(std::arg(edge), -1.6677706876342782, 1e-12);

    ModelParams flat = m;
    flat.alpha4 = 0.0;
    flat.beta3 = 1e-300;  // keeps the dip positive while forcing A = 1
    EXPECT_NEAR(std::abs(irs::model_reflection(flat, 1.0, 2.45e9)), 1.0, 1e-15);
}

TEST(Analytic, Codebook) {
    const auto b1 = irs::codebook(1);
    ASSERT_EQ(b1.size(), 2u);
    EXPECT_DOUBLE_EQ(b1[0], -kPi);
    EXPECT_DOUBLE_EQ(b1[1], 0.0);

    const auto b2 = irs::codebook(2);
    ASSERT_EQ(b2.size(), 4u);
    EXPECT_DOUBLE_EQ(b2[1], -kPi / 2);
    EXPECT_DOUBLE_EQ(b2[3], kPi / 2);

    const auto b3 = irs::codebook(3);
    ASSERT_EQ(b3.size(), 8u);
    EXPECT_DOUBLE_EQ(b3[1], -3 * kPi / 4);
    EXPECT_DOUBLE_EQ(b3[7], 3 * kPi / 4);
    for (int bits = 1; bits <= 8; ++bits) {
        const auto cb = irs::codebook(bits);
        for (std::size_t i = 0; i < cb.size(); ++i) {
            EXPECT_GE(cb[i], -kPi);
            EXPECT_LT(cb[i], kPi);
            if (i > 0) EXPECT_GT(cb[i], cb[i - 1]);
        }
    }
    EXPECT_THROW(irs::codebook(0), irs::InvalidArgument);
    EXPECT_THROW(irs::codebook(9), irs::InvalidArgument);
}

TEST(Analytic, RangeOnGrid) {
    const ModelParams m;
    for (int bits = 1; bits <= 4; ++bits)
        for (double x : irs::codebook(bits).values)
            for (double f : irs::linspace(2.2e9, 2.6e9, 401)) {
                const double a = irs::model_amplitude(m, x, f);
                const double th = irs::model_phase(m, x, f);
                EXPECT_GE(a, 0.0);
                EXPECT_LE(a, 1.0);
                EXPECT_GT(th, -kPi);
                EXPECT_LT(th, kPi);
            }
}

TEST(Analytic, CenterFrequencyFidelity) {
    // Reference deviations |wrap(theta(x, f_c) - x)| from the scalar oracle.
    const double expected[] = {0.4251054597043016, 0.0022163655567566387, 0.20199656334080718,
                               0.14028758457198665, 0.0, 0.05757379169839183,
                               0.011246268799697923, 0.25169926006003784};
    const ModelParams m;
    const auto cb = irs::codebook(3);
    for (std::size_t b = 0; b < cb.size(); ++b) {
        const double dev = irs::wrapped_distance(irs::model_phase(m, cb[b], 2.4e9), cb[b]);
        EXPECT_NEAR(dev, expected[b], 1e-12);
        // x = -pi lies outside the phases the fitted circuit can realize and
        // misses by 0.425 rad; every other entry stays inside 0.3 rad.
        if (b > 0) EXPECT_LE(dev, 0.3) << b;
    }
}

TEST(Analytic, AmplitudeMinimumAtResonance) {
    const ModelParams m;
    const auto grid = irs::linspace(2.2e9, 2.6e9, 401);
    for (double x : irs::codebook(3).values) {
        std::size_t arg_min = 0, nearest = 0;
        const double target = irs::f1(m, x) * 1e9;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (irs::model_amplitude(m, x, grid[i]) < irs::model_amplitude(m, x, grid[arg_min])) arg_min = i;
            if (std::abs(grid[i] - target) < std::abs(grid[nearest] - target)) nearest = i;
        }
        EXPECT_EQ(arg_min, nearest) << x;
    }
}

TEST(Analytic, PhaseStrictlyDecreasing) {
    const ModelParams m;
    EXPECT_GT(m.beta2 + m.alpha3 * kPi, 0.0);
    const auto grid = irs::linspace(2.2e9, 2.6e9, 401);
    for (double x : irs::codebook(3).values)
        for (std::size_t i = 1; i < grid.size(); ++i)
            EXPECT_LT(irs::model_phase(m, x, grid[i]), irs::model_phase(m, x, grid[i - 1]));
}

TEST(Analytic, ParamsValidation) {
    ModelParams m;
    EXPECT_NO_THROW(m.validate());
    EXPECT_TRUE(m.dip_positive());
    m.alpha4 = 1.0;  // a4 * (-pi) + 1.65 < 0
    EXPECT_FALSE(m.dip_positive());
    EXPECT_THROW(m.validate(), irs::InvalidArgument);
    m = ModelParams{};
    m.beta1 = std::nan("");
    EXPECT_THROW(m.validate(), irs::InvalidArgument);
}

}  // namespace
