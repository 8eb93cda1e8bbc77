// SPDX-License-Identifier: Apache-2.0
//
// Per-subcarrier channels for the AP -> IRS -> user link and the direct
// AP -> user link.
//
// Each link is a tapped delay line with L i.i.d. circularly-symmetric
// Gaussian taps (uniform power-delay profile, taps at l * tap_spacing) whose
// total power equals the distance path loss. Subcarrier responses are the
// discrete-frequency response of the taps at the baseband offset f_k - f_c.

#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "irs/common.hpp"

namespace irs {

struct SystemConfig {
    int n_elements = 32;
    int n_subcarriers = 16;
    double bandwidth = 100e6;          ///< [Hz]
    double center_frequency = 2.4e9;   ///< [Hz]
    double noise_variance = dbm_to_watts(-104.0);  ///< per subcarrier [W]
    double max_power = dbm_to_watts(20.0);         ///< [W]
    double d_ap_irs = 50.0;            ///< [m]
    double d_irs_user = 2.0;           ///< [m]
    double ref_attenuation_db = 30.0;  ///< at 1 m
    double exp_ap_irs = 2.5;
    double exp_irs_user = 2.8;
    double exp_ap_user = 3.5;
    int n_taps = 8;
    double tap_spacing = 10e-9;        ///< [s]

    void validate() const {
        detail::require(n_elements >= 0, "SystemConfig: n_elements must be non-negative");
        detail::require(n_subcarriers >= 1, "SystemConfig: n_subcarriers must be positive");
        detail::require(n_taps >= 1, "SystemConfig: n_taps must be positive");
        detail::require(bandwidth > 0 && center_frequency > 0 && noise_variance > 0 && max_power > 0,
                        "SystemConfig: bandwidth, frequency, noise and power must be positive");
        detail::require(d_ap_irs > 0 && d_irs_user > 0, "SystemConfig: distances must be positive");
        detail::require(ref_attenuation_db > 0, "SystemConfig: reference attenuation must be positive");
        detail::require(exp_ap_irs > 0 && exp_irs_user > 0 && exp_ap_user > 0,
                        "SystemConfig: path-loss exponents must be positive");
        detail::require(tap_spacing >= 0, "SystemConfig: tap spacing must be non-negative");
    }
};

struct ChannelRealization {
    Eigen::VectorXcd h_direct;    ///< K
    Eigen::MatrixXcd h_irs_user;  ///< N x K
    Eigen::MatrixXcd g_ap_irs;    ///< N x K
    std::vector<double> frequencies;

    int elements() const { return static_cast<int>(h_irs_user.rows()); }
    int subcarriers() const { return static_cast<int>(h_direct.size()); }
};

/// Linear power gain of a link of length `d` (>= 1 m).
inline double path_loss_gain(double d, double exponent, double ref_attenuation_db) {
    detail::require(d >= 1.0, "path_loss_gain: distance must be at least 1 m");
    return std::pow(10.0, -(ref_attenuation_db + 10.0 * exponent * std::log10(d)) / 10.0);
}

/// Subcarrier centers f_c - B/2 + (k + 1/2) B/K, k = 0..K-1.
inline std::vector<double> subcarrier_frequencies(double f_c, double bandwidth, int k_count) {
    detail::require(k_count >= 1, "subcarrier_frequencies: K must be positive");
    std::vector<double> f(k_count);
    const double spacing = bandwidth / k_count;
    for (int k = 0; k < k_count; ++k) f[k] = f_c - bandwidth / 2.0 + (k + 0.5) * spacing;
    return f;
}

/// AP-user distance with the user on a circle of radius d_irs_user around
/// the IRS, `user_angle` measured from the IRS->AP direction.
inline double ap_user_distance(const SystemConfig& cfg, double user_angle) {
    const double a = cfg.d_ap_irs, b = cfg.d_irs_user;
    return std::sqrt(a * a + b * b - 2.0 * a * b * std::cos(user_angle));
}

namespace detail {

inline Eigen::MatrixXcd draw_taps(std::mt19937_64& rng, int rows, int taps, double link_gain) {
    std::normal_distribution<double> normal(0.0, std::sqrt(link_gain / taps / 2.0));
    Eigen::MatrixXcd h(rows, taps);
    for (int r = 0; r < rows; ++r)
        for (int l = 0; l < taps; ++l) {
            const double re = normal(rng);
            const double im = normal(rng);
            h(r, l) = {re, im};
        }
    return h;
}

}  // namespace detail

/// L x K matrix mapping delay taps to subcarrier responses.
inline Eigen::MatrixXcd tap_to_subcarrier(const SystemConfig& cfg, const std::vector<double>& freqs) {
    Eigen::MatrixXcd dft(cfg.n_taps, static_cast<Eigen::Index>(freqs.size()));
    for (int l = 0; l < cfg.n_taps; ++l)
        for (std::size_t k = 0; k < freqs.size(); ++k)
            dft(l, k) = std::polar(1.0, -kTwoPi * (freqs[k] - cfg.center_frequency) * l * cfg.tap_spacing);
    return dft;
}

/// Draws one static channel realization. Taps are drawn before any
/// frequency-dependent step, so the same seed yields the same physical
/// taps for any subcarrier grid.
inline ChannelRealization generate_channels(const SystemConfig& cfg, double user_angle, std::uint64_t seed) {
    cfg.validate();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);

    const double d_au = ap_user_distance(cfg, user_angle);
    const Eigen::MatrixXcd direct_taps =
        detail::draw_taps(rng, 1, cfg.n_taps, path_loss_gain(d_au, cfg.exp_ap_user, cfg.ref_attenuation_db));
    const Eigen::MatrixXcd irs_user_taps = detail::draw_taps(
        rng, cfg.n_elements, cfg.n_taps, path_loss_gain(cfg.d_irs_user, cfg.exp_irs_user, cfg.ref_attenuation_db));
    const Eigen::MatrixXcd ap_irs_taps = detail::draw_taps(
        rng, cfg.n_elements, cfg.n_taps, path_loss_gain(cfg.d_ap_irs, cfg.exp_ap_irs, cfg.ref_attenuation_db));

    ChannelRealization ch;
    ch.frequencies = subcarrier_frequencies(cfg.center_frequency, cfg.bandwidth, cfg.n_subcarriers);
    const Eigen::MatrixXcd dft = tap_to_subcarrier(cfg, ch.frequencies);
    ch.h_direct = (direct_taps * dft).row(0).transpose();
    ch.h_irs_user = irs_user_taps * dft;
    ch.g_ap_irs = ap_irs_taps * dft;
    return ch;
}

/// CSV dump `link,element,subcarrier,re,im`; the direct link uses element 0.
inline void write_channel_csv(std::ostream& os, const ChannelRealization& ch) {
    os << "link,element,subcarrier,re,im\n";
    os.precision(17);
    for (int k = 0; k < ch.subcarriers(); ++k)
        os << "direct,0," << k << ',' << ch.h_direct[k].real() << ',' << ch.h_direct[k].imag() << '\n';
    auto dump = [&](const char* name, const Eigen::MatrixXcd& m) {
        for (Eigen::Index n = 0; n < m.rows(); ++n)
            for (Eigen::Index k = 0; k < m.cols(); ++k)
                os << name << ',' << n << ',' << k << ',' << m(n, k).real() << ',' << m(n, k).imag() << '\n';
    };
    dump("irs_user", ch.h_irs_user);
    dump("ap_irs", ch.g_ap_irs);
}

}  // namespace irs
