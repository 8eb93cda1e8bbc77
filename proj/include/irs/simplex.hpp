// SPDX-License-Identifier: Apache-2.0
//
// Derivative-free Nelder-Mead minimizer.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace irs {

struct SimplexOptions {
    int max_evaluations = 20000;
    /// Stop (or restart) once the spread of objective values across the
    /// simplex falls below this relative tolerance.
    double f_tolerance = 1e-15;
    double x_tolerance = 1e-12;
    /// Rebuild the simplex around the incumbent after it collapses, as long
    /// as budget remains and the previous round still improved.
    bool restart_on_collapse = true;
};

struct SimplexResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
};

/// Minimizes `f` starting from `start`, with initial edge lengths `step`.
/// Non-finite objective values are treated as +infinity.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> start, std::vector<double> step,
                                 const SimplexOptions& opts = {}) {
    const std::size_t n = start.size();
    SimplexResult best{start, std::numeric_limits<double>::infinity(), 0};

    auto eval = [&](const std::vector<double>& x) {
        ++best.evaluations;
        const double v = f(x);
        const double value = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        if (value < best.value) {
            best.value = value;
            best.x = x;
        }
        return value;
    };

    std::vector<std::vector<double>> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    auto build = [&](const std::vector<double>& base) {
        pts.assign(n + 1, base);
        for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
        for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);
    };
    auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (worst[j] - centroid[j]);
    };

    build(start);
    double round_start = best.value;

    while (best.evaluations < opts.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t lo = order.front(), hi = order.back(), second = order[n - 1];

        double size = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(pts[i][j] - pts[lo][j]));
        const double spread = vals[hi] - vals[lo];
        const bool collapsed = (std::isfinite(spread) &&
                                spread <= opts.f_tolerance * (std::abs(vals[lo]) + 1e-300)) ||
                               size <= opts.x_tolerance;
        if (collapsed) {
            if (!opts.restart_on_collapse || !(best.value < round_start)) break;
            round_start = best.value;
            build(best.x);
            continue;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == hi) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
        }

        along(-1.0, trial, pts[hi]);
        const double fr = eval(trial);
        if (fr < vals[lo]) {
            along(-2.0, trial2, pts[hi]);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[hi] = trial2;
                vals[hi] = fe;
            } else {
                pts[hi] = trial;
                vals[hi] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[hi] = trial;
            vals[hi] = fr;
            continue;
        }
        // Outside contraction when the reflected point beats the worst,
        // inside contraction otherwise.
        const bool outside = fr < vals[hi];
        along(outside ? -0.5 : 0.5, trial2, pts[hi]);
        const double fc = eval(trial2);
        if (fc < (outside ? fr : vals[hi])) {
            pts[hi] = trial2;
            vals[hi] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == lo) continue;
            for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[lo][j] + 0.5 * (pts[i][j] - pts[lo][j]);
            vals[i] = eval(pts[i]);
        }
    }
    return best;
}

}  // namespace irs
