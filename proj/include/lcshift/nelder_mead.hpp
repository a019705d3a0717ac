#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace lcshift::optim {

struct NmResult {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

// Nelder-Mead simplex MAXIMIZATION. The objective may return -inf to mark
// infeasible points. Convergence: spread of simplex values below tol.
inline NmResult nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, double scale,
                                double tol, int max_evals) {
    const std::size_t n = start.size();
    NmResult res;
    int evals = 0;
    auto eval = [&](const std::vector<double>& p) {
        ++evals;
        const double v = f(p);
        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> value(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += (start[i] != 0.0 ? 0.1 * std::abs(start[i]) + scale : scale);
    for (std::size_t i = 0; i <= n; ++i) value[i] = eval(simplex[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return value[a] > value[b];
        });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> v2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            v2[i] = value[idx[i]];
        }
        simplex.swap(s2);
        value.swap(v2);
    };

    while (evals < max_evals) {
        order();
        if (std::isfinite(value[n]) && value[0] - value[n] < tol) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;

        auto combine = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
            return p;
        };

        const auto reflected = combine(-1.0);
        const double fr = eval(reflected);
        if (fr > value[0]) {
            const auto expanded = combine(-2.0);
            const double fe = eval(expanded);
            if (fe > fr) {
                simplex[n] = expanded;
                value[n] = fe;
            } else {
                simplex[n] = reflected;
                value[n] = fr;
            }
        } else if (fr > value[n - 1]) {
            simplex[n] = reflected;
            value[n] = fr;
        } else {
            const auto contracted = combine(fr > value[n] ? -0.5 : 0.5);
            const double fc = eval(contracted);
            if (fc > std::max(fr, value[n])) {
                simplex[n] = contracted;
                value[n] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    value[i] = eval(simplex[i]);
                }
            }
        }
    }
    order();
    res.x = simplex[0];
    res.value = value[0];
    res.evaluations = evals;
    return res;
}

} // namespace lcshift::optim
