#include "lcshift/lcmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lcshift/errors.hpp"
#include "lcshift/exp_linear.hpp"

namespace lcshift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

} // namespace

WeightedSample aggregate(const std::vector<double>& observations) {
    if (observations.size() < 2)
        throw FewerThanTwoDistinctPoints("need at least 2 observations");
    for (double v : observations)
        if (!std::isfinite(v)) throw NumericError("non-finite observation");

    std::vector<double> sorted = observations;
    std::sort(sorted.begin(), sorted.end());

    WeightedSample out;
    out.raw_n = sorted.size();
    const double unit = 1.0 / static_cast<double>(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.points.push_back(sorted[i]);
        out.weights.push_back(static_cast<double>(j - i) * unit);
        i = j;
    }
    if (out.points.size() < 2)
        throw FewerThanTwoDistinctPoints("all observations identical");
    return out;
}

// ---------------------------------------------------------------------------
// PiecewiseLogLinearDensity

PiecewiseLogLinearDensity::PiecewiseLogLinearDensity(
    std::vector<double> knots, std::vector<double> log_values,
    bool enforce_normalization)
    : knots_(std::move(knots)), log_values_(std::move(log_values)) {
    const std::size_t k = knots_.size();
    if (k < 2 || log_values_.size() != k)
        throw InvalidDensity("need >= 2 knots with matching log-values");
    for (std::size_t i = 0; i + 1 < k; ++i)
        if (!(knots_[i] < knots_[i + 1]))
            throw InvalidDensity("knots must be strictly increasing");

    slopes_.resize(k - 1);
    for (std::size_t i = 0; i + 1 < k; ++i)
        slopes_[i] = (log_values_[i + 1] - log_values_[i]) / (knots_[i + 1] - knots_[i]);
    for (std::size_t i = 0; i + 2 < k; ++i) {
        const double slack = 1e-9 * (1.0 + std::abs(slopes_[i]) + std::abs(slopes_[i + 1]));
        if (slopes_[i + 1] > slopes_[i] + slack)
            throw InvalidDensity("log-values are not concave");
    }

    cum_mass_.assign(k, 0.0);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const double h = knots_[i + 1] - knots_[i];
        cum_mass_[i + 1] =
            cum_mass_[i] + expseg::segment_mass(log_values_[i], log_values_[i + 1], h);
    }
    total_mass_ = cum_mass_.back();
    if (!std::isfinite(total_mass_) || total_mass_ <= 0.0)
        throw InvalidDensity("density mass is not finite and positive");
    if (enforce_normalization && std::abs(total_mass_ - 1.0) > 1e-8)
        throw InvalidDensity("density does not integrate to 1");
}

double PiecewiseLogLinearDensity::log_pdf(double x) const {
    if (x < knots_.front() || x > knots_.back()) return kNegInf;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    if (i == knots_.size()) return log_values_.back();
    if (i == 0) return log_values_.front();
    --i;
    return log_values_[i] + slopes_[i] * (x - knots_[i]);
}

double PiecewiseLogLinearDensity::pdf(double x) const {
    const double l = log_pdf(x);
    return l == kNegInf ? 0.0 : std::exp(l);
}

double PiecewiseLogLinearDensity::cdf(double x) const {
    if (x <= knots_.front()) return 0.0;
    if (x >= knots_.back()) return 1.0;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double h = x - knots_[i];
    const double part =
        expseg::segment_mass(log_values_[i], log_values_[i] + slopes_[i] * h, h);
    return (cum_mass_[i] + part) / total_mass_;
}

Moments PiecewiseLogLinearDensity::moments() const {
    Moments m;
    double mass = 0.0, mom1 = 0.0, mom2 = 0.0;
    m.cdf_at_knots.assign(knots_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        const double h = knots_[i + 1] - knots_[i];
        const double a = log_values_[i];
        const double b = log_values_[i + 1];
        const double s0 = expseg::segment_mass(a, b, h);
        const double s1 = expseg::segment_moment1(a, b, h);
        const double s2 = expseg::segment_moment2(a, b, h);
        const double x0 = knots_[i];
        mass += s0;
        mom1 += x0 * s0 + s1;
        mom2 += x0 * x0 * s0 + 2.0 * x0 * s1 + s2;
        m.cdf_at_knots[i + 1] = mass;
    }
    for (double& c : m.cdf_at_knots) c /= mass;
    m.mean = mom1 / mass;
    m.variance = mom2 / mass - m.mean * m.mean;
    return m;
}

double log_likelihood(const PiecewiseLogLinearDensity& density,
                      const WeightedSample& sample) {
    double s = 0.0;
    for (std::size_t i = 0; i < sample.points.size(); ++i)
        s += sample.weights[i] * density.log_pdf(sample.points[i]);
    return s - density.total_mass();
}

// ---------------------------------------------------------------------------
// Active-set fit

namespace {

struct Solver {
    const std::vector<double>& x;
    const std::vector<double>& w;
    std::vector<double> gap;      // x[i+1] - x[i]
    std::vector<double> cumw;     // sum of w up to and including i
    std::vector<std::size_t> kinks;
    std::vector<double> phi;      // current feasible log-values on the grid
    double kkt_tol;
    FitTrace* trace;

    Solver(const WeightedSample& s, double tol, FitTrace* t)
        : x(s.points), w(s.weights), kkt_tol(tol), trace(t) {
        const std::size_t k = x.size();
        gap.resize(k - 1);
        for (std::size_t i = 0; i + 1 < k; ++i) gap[i] = x[i + 1] - x[i];
        cumw.resize(k);
        double c = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            c += w[i];
            cumw[i] = c;
        }
        kinks = {0, k - 1};
        phi.assign(k, -std::log(x.back() - x.front())); // uniform start
    }

    // Objective restricted to phi linear between the current kinks.
    double objective(const std::vector<double>& full_phi) const {
        double lin = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) lin += w[i] * full_phi[i];
        double mass = 0.0;
        for (std::size_t a = 0; a + 1 < kinks.size(); ++a) {
            const std::size_t l = kinks[a], r = kinks[a + 1];
            mass += expseg::segment_mass(full_phi[l], full_phi[r], x[r] - x[l]);
        }
        if (!std::isfinite(mass)) return kNegInf;
        return lin - mass;
    }

    // Hat-function weights of the data against the current kink grid.
    std::vector<double> linear_coeffs() const {
        std::vector<double> c(kinks.size(), 0.0);
        for (std::size_t a = 0; a + 1 < kinks.size(); ++a) {
            const std::size_t l = kinks[a], r = kinks[a + 1];
            const double len = x[r] - x[l];
            for (std::size_t i = l + 1; i < r; ++i) {
                const double t = (x[i] - x[l]) / len;
                c[a] += w[i] * (1.0 - t);
                c[a + 1] += w[i] * t;
            }
        }
        for (std::size_t a = 0; a < kinks.size(); ++a) c[a] += w[kinks[a]];
        return c;
    }

    void interpolate(const std::vector<double>& psi, std::vector<double>& out) const {
        out.assign(x.size(), 0.0);
        for (std::size_t a = 0; a + 1 < kinks.size(); ++a) {
            const std::size_t l = kinks[a], r = kinks[a + 1];
            const double len = x[r] - x[l];
            out[l] = psi[a];
            for (std::size_t i = l + 1; i < r; ++i) {
                const double t = (x[i] - x[l]) / len;
                out[i] = psi[a] * (1.0 - t) + psi[a + 1] * t;
            }
        }
        out[x.size() - 1] = psi.back();
    }

    // Damped Newton on the kink values; returns true if the gradient norm
    // target was met.
    bool newton(std::vector<double>& psi, double gtol, int max_iter) const {
        const std::size_t p = psi.size();
        const std::vector<double> c = linear_coeffs();
        std::vector<double> grad(p), diag(p), off(p > 1 ? p - 1 : 0);
        std::vector<double> lower(p), dvec(p), rhs(p), step(p), trial(p);

        auto kink_objective = [&](const std::vector<double>& q) {
            double lin = 0.0, mass = 0.0;
            for (std::size_t a = 0; a < p; ++a) lin += c[a] * q[a];
            for (std::size_t a = 0; a + 1 < p; ++a) {
                mass += expseg::segment_mass(q[a], q[a + 1],
                                             x[kinks[a + 1]] - x[kinks[a]]);
            }
            if (!std::isfinite(mass)) return kNegInf;
            return lin - mass;
        };

        double fcur = kink_objective(psi);
        for (int it = 0; it < max_iter; ++it) {
            std::fill(grad.begin(), grad.end(), 0.0);
            std::fill(diag.begin(), diag.end(), 0.0);
            std::fill(off.begin(), off.end(), 0.0);
            for (std::size_t a = 0; a + 1 < p; ++a) {
                const double h = x[kinks[a + 1]] - x[kinks[a]];
                const double u = psi[a + 1] - psi[a];
                const double ea = std::exp(psi[a]);
                const double m0 = expseg::m0(u), m1 = expseg::m1(u), m2 = expseg::m2(u);
                grad[a] -= h * ea * (m0 - m1);
                grad[a + 1] -= h * ea * m1;
                diag[a] += h * ea * (m0 - 2.0 * m1 + m2);
                diag[a + 1] += h * ea * m2;
                off[a] += h * ea * (m1 - m2);
            }
            for (std::size_t a = 0; a < p; ++a) grad[a] += c[a];

            double gnorm = 0.0;
            for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
            if (gnorm <= gtol) return true;

            // Thomas solve of the (positive definite) tridiagonal system.
            // A tiny ridge handles the rare loss of definiteness from
            // round-off in nearly-degenerate segments.
            double ridge = 0.0;
            for (int attempt = 0; attempt < 5; ++attempt) {
                bool ok = true;
                lower[0] = diag[0] + ridge;
                rhs[0] = grad[0];
                for (std::size_t a = 1; a < p; ++a) {
                    if (lower[a - 1] <= 0.0) {
                        ok = false;
                        break;
                    }
                    const double m = off[a - 1] / lower[a - 1];
                    lower[a] = diag[a] + ridge - m * off[a - 1];
                    rhs[a] = grad[a] - m * rhs[a - 1];
                }
                if (ok && lower[p - 1] > 0.0) {
                    step[p - 1] = rhs[p - 1] / lower[p - 1];
                    for (std::size_t a = p - 1; a-- > 0;)
                        step[a] = (rhs[a] - off[a] * step[a + 1]) / lower[a];
                    break;
                }
                ridge = (ridge == 0.0) ? 1e-12 : ridge * 100.0;
                if (attempt == 4)
                    for (std::size_t a = 0; a < p; ++a) step[a] = grad[a];
            }

            double slope = 0.0;
            for (std::size_t a = 0; a < p; ++a) slope += grad[a] * step[a];
            if (slope <= 0.0)
                for (std::size_t a = 0; a < p; ++a) step[a] = grad[a];

            double t = 1.0;
            bool accepted = false;
            for (int half = 0; half < 60; ++half) {
                for (std::size_t a = 0; a < p; ++a) trial[a] = psi[a] + t * step[a];
                const double ftrial = kink_objective(trial);
                if (ftrial > fcur + 1e-4 * t * slope ||
                    (ftrial > fcur && half > 30)) {
                    psi.swap(trial);
                    fcur = ftrial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) return false; // stalled: cannot improve further
        }
        return false;
    }

    std::vector<double> bends(const std::vector<double>& full_phi) const {
        std::vector<double> b(kinks.size(), 0.0);
        for (std::size_t a = 1; a + 1 < kinks.size(); ++a) {
            const std::size_t l = kinks[a - 1], m = kinks[a], r = kinks[a + 1];
            const double sl = (full_phi[m] - full_phi[l]) / (x[m] - x[l]);
            const double sr = (full_phi[r] - full_phi[m]) / (x[r] - x[m]);
            b[a] = sl - sr;
        }
        return b;
    }

    double bend_scale(std::size_t a, const std::vector<double>& full_phi) const {
        const std::size_t l = kinks[a - 1], m = kinks[a], r = kinks[a + 1];
        const double sl = (full_phi[m] - full_phi[l]) / (x[m] - x[l]);
        const double sr = (full_phi[r] - full_phi[m]) / (x[r] - x[m]);
        return 1.0 + std::abs(sl) + std::abs(sr);
    }

    // KKT residuals R_j = int_{x_1}^{x_j} (F_n - F_hat); the fit is optimal
    // when R_j >= 0 on the grid with equality at the kinks.
    std::vector<double> kkt_residuals() const {
        const std::size_t k = x.size();
        std::vector<double> r(k, 0.0);
        double fhat = 0.0, acc = 0.0;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            const double u = phi[i + 1] - phi[i];
            const double e = std::exp(phi[i]);
            acc += gap[i] * (cumw[i] - fhat) - gap[i] * gap[i] * e * expseg::k2(u);
            fhat += gap[i] * e * expseg::m0(u);
            r[i + 1] = acc;
        }
        return r;
    }

    void record() {
        if (trace) trace->objective.push_back(objective(phi));
    }

    PiecewiseLogLinearDensity run(int max_iterations) {
        const std::size_t k = x.size();
        const double range_scale = std::max(1.0, x.back() - x.front());
        const double tol_r = kkt_tol * range_scale;
        std::vector<double> psi = {phi.front(), phi.back()};
        std::vector<char> is_kink(k, 0);
        is_kink[0] = is_kink[k - 1] = 1;

        int iter = 0;
        double gtol = 1e-13;
        while (iter++ < max_iterations) {
            // Solve the smooth subproblem; repair concavity by stepping from
            // the last feasible iterate and dropping kinks that go straight.
            for (int repair = 0; repair <= static_cast<int>(k); ++repair) {
                newton(psi, gtol, 120);
                std::vector<double> cand;
                interpolate(psi, cand);
                const std::vector<double> b = bends(cand);
                double worst = 0.0;
                for (std::size_t a = 1; a + 1 < kinks.size(); ++a)
                    worst = std::min(worst, b[a] / bend_scale(a, cand));
                if (worst >= -1e-11) {
                    phi.swap(cand);
                    record();
                    break;
                }
                const std::vector<double> b_old = bends(phi);
                double tmax = 1.0;
                for (std::size_t a = 1; a + 1 < kinks.size(); ++a) {
                    if (b[a] < 0.0) {
                        const double num = std::max(b_old[a], 0.0);
                        tmax = std::min(tmax, num / (num - b[a]));
                    }
                }
                for (std::size_t i = 0; i < k; ++i)
                    phi[i] = (1.0 - tmax) * phi[i] + tmax * cand[i];
                record();
                const std::vector<double> b_mix = bends(phi);
                std::vector<std::size_t> kept = {0};
                for (std::size_t a = 1; a + 1 < kinks.size(); ++a) {
                    if (b_mix[a] > 1e-12 * bend_scale(a, phi))
                        kept.push_back(kinks[a]);
                    else
                        is_kink[kinks[a]] = 0;
                }
                kept.push_back(k - 1);
                if (kept.size() == kinks.size()) {
                    // Nothing hit zero (can happen from round-off); drop the
                    // most negative bend outright to guarantee progress.
                    std::size_t drop = 1;
                    double worst_b = b_mix[1];
                    for (std::size_t a = 2; a + 1 < kinks.size(); ++a)
                        if (b_mix[a] < worst_b) {
                            worst_b = b_mix[a];
                            drop = a;
                        }
                    is_kink[kinks[drop]] = 0;
                    kept.clear();
                    for (std::size_t a = 0; a < kinks.size(); ++a)
                        if (a != drop) kept.push_back(kinks[a]);
                }
                kinks.swap(kept);
                psi.resize(kinks.size());
                for (std::size_t a = 0; a < kinks.size(); ++a) psi[a] = phi[kinks[a]];
            }

            const std::vector<double> r = kkt_residuals();
            double worst = 0.0;
            std::size_t worst_j = 0;
            for (std::size_t j = 1; j + 1 < k; ++j) {
                if (!is_kink[j] && r[j] < worst) {
                    worst = r[j];
                    worst_j = j;
                }
            }
            double kink_resid = 0.0;
            for (std::size_t j : kinks) kink_resid = std::max(kink_resid, std::abs(r[j]));

            if (worst >= -tol_r && kink_resid <= tol_r) {
                std::vector<double> knots, logs;
                for (std::size_t j : kinks) {
                    knots.push_back(x[j]);
                    logs.push_back(phi[j]);
                }
                // Exact renormalization; the shift is within solver tolerance.
                double mass = 0.0;
                for (std::size_t a = 0; a + 1 < knots.size(); ++a)
                    mass += expseg::segment_mass(logs[a], logs[a + 1],
                                                 knots[a + 1] - knots[a]);
                const double shift = std::log(mass);
                for (double& v : logs) v -= shift;
                if (trace) trace->active_set_iterations = iter;
                return PiecewiseLogLinearDensity(std::move(knots), std::move(logs));
            }

            if (worst < -tol_r) {
                is_kink[worst_j] = 1;
                kinks.insert(std::upper_bound(kinks.begin(), kinks.end(), worst_j),
                             worst_j);
                psi.resize(kinks.size());
                for (std::size_t a = 0; a < kinks.size(); ++a) psi[a] = phi[kinks[a]];
            } else {
                gtol = std::max(gtol * 0.1, 1e-16); // kink residuals too loose
            }
        }
        throw NonConvergence("log-concave MLE active-set loop did not converge",
                             max_iterations);
    }
};

} // namespace

PiecewiseLogLinearDensity fit_lcmle(const WeightedSample& sample,
                                    const FitOptions& options, FitTrace* trace) {
    const std::size_t k = sample.points.size();
    if (k < 2) throw FewerThanTwoDistinctPoints("need >= 2 distinct points");
    if (sample.weights.size() != k)
        throw NumericError("weights/points size mismatch");
    double wsum = 0.0;
    for (double v : sample.weights) {
        if (!(v > 0.0)) throw NumericError("weights must be positive");
        wsum += v;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw NumericError("weights must sum to 1");
    if (!(options.tol > 0.0)) throw NumericError("tolerance must be positive");

    Solver solver(sample, options.tol, trace);
    return solver.run(options.max_iterations);
}

} // namespace lcshift
