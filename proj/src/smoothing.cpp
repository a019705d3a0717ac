#include "lcshift/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lcshift/errors.hpp"
#include "lcshift/exp_linear.hpp"
#include "lcshift/normal.hpp"

namespace lcshift {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double compute_bandwidth(double base_variance, double pooled_sample_variance) {
    const double diff = pooled_sample_variance - base_variance;
    if (diff <= 1e-12)
        throw NonPositiveBandwidth("pooled variance does not exceed fitted variance");
    return std::sqrt(diff);
}

SmoothedDensity::SmoothedDensity(PiecewiseLogLinearDensity base, double bandwidth)
    : base_(std::move(base)), lambda_(bandwidth), lambda_sq_(bandwidth * bandwidth) {
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
        throw InvalidDensity("bandwidth must be positive and finite");
    const Moments m = base_.moments();
    mean_ = m.mean;
    variance_ = m.variance + lambda_sq_;
    const auto& kn = base_.knots();
    const auto& lv = base_.log_values();
    const auto& sl = base_.slopes();
    for (std::size_t i = 0; i + 1 < kn.size(); ++i) {
        seg_left_.push_back(kn[i]);
        seg_right_.push_back(kn[i + 1]);
        seg_loga_.push_back(lv[i]);
        seg_slope_.push_back(sl[i]);
    }
}

// Segment i contributes exp(theta_i) * (Phi(beta_i) - Phi(alpha_i)) to the
// density at x, with
//   theta = a + b (x - l) + b^2 lambda^2 / 2,
//   beta  = (x - l)/lambda + b lambda,   alpha = (x - r)/lambda + b lambda.
struct SmoothedDensity::Terms {
    std::vector<double> log_term; // theta + log(Phi(beta) - Phi(alpha))
    std::vector<double> log_dphi; // log(Phi(beta) - Phi(alpha))
    std::vector<double> alpha, beta;
    double log_density;
};

namespace {

SmoothedDensity::Terms make_terms(double x, double lambda,
                                  const std::vector<double>& l,
                                  const std::vector<double>& r,
                                  const std::vector<double>& a,
                                  const std::vector<double>& b) {
    SmoothedDensity::Terms t;
    const std::size_t n = l.size();
    t.log_term.resize(n);
    t.log_dphi.resize(n);
    t.alpha.resize(n);
    t.beta.resize(n);
    double best = kNegInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double bl = b[i] * lambda;
        t.beta[i] = (x - l[i]) / lambda + bl;
        t.alpha[i] = (x - r[i]) / lambda + bl;
        const double theta = a[i] + b[i] * (x - l[i]) + 0.5 * bl * bl;
        t.log_dphi[i] = normal::log_cdf_diff(t.alpha[i], t.beta[i]);
        t.log_term[i] = theta + t.log_dphi[i];
        best = std::max(best, t.log_term[i]);
    }
    if (best == kNegInf) {
        t.log_density = kNegInf;
        return t;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(t.log_term[i] - best);
    t.log_density = best + std::log(s);
    return t;
}

// (pdf(beta) - pdf(alpha)) / (Phi(beta) - Phi(alpha)), stable in the tails.
double pdf_diff_ratio(double alpha, double beta, double log_delta_phi) {
    const double la = normal::log_pdf(alpha);
    const double lb = normal::log_pdf(beta);
    if (la == lb) return 0.0;
    const double hi = std::max(la, lb);
    const double lo = std::min(la, lb);
    const double mag = hi + std::log1p(-std::exp(lo - hi)) - log_delta_phi;
    const double v = std::exp(mag);
    return lb > la ? v : -v;
}

} // namespace

double SmoothedDensity::log_pdf(double x) const {
    return make_terms(x, lambda_, seg_left_, seg_right_, seg_loga_, seg_slope_)
        .log_density;
}

double SmoothedDensity::pdf(double x) const { return std::exp(log_pdf(x)); }

double SmoothedDensity::score(double x) const {
    const Terms t =
        make_terms(x, lambda_, seg_left_, seg_right_, seg_loga_, seg_slope_);
    if (t.log_density == kNegInf) return -(x - mean_) / lambda_sq_; // Gaussian tail limit
    double s = 0.0;
    for (std::size_t i = 0; i < t.log_term.size(); ++i) {
        const double w = std::exp(t.log_term[i] - t.log_density);
        if (w == 0.0) continue;
        const double ratio = pdf_diff_ratio(t.alpha[i], t.beta[i], t.log_dphi[i]);
        s += w * (seg_slope_[i] + ratio / lambda_);
    }
    return s;
}

double SmoothedDensity::cdf(double x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < seg_left_.size(); ++i) {
        const double l = seg_left_[i], r = seg_right_[i];
        const double a = seg_loga_[i], b = seg_slope_[i];
        const double h = r - l;
        const double u = b * h;
        const double c = (x - l) / lambda_;
        const double d = h / lambda_;
        if (std::abs(u) > 1e-4) {
            const double bl = b * lambda_;
            const double theta = a + b * (x - l) + 0.5 * bl * bl;
            const double beta = c + bl;
            const double alpha = c - d + bl;
            const double conv = std::exp(theta + normal::log_cdf_diff(alpha, beta));
            total += (std::exp(a + u) * normal::cdf(c - d) -
                      std::exp(a) * normal::cdf(c) + conv) /
                     b;
        } else {
            // Flat segment: series in u with closed-form Gaussian moments.
            const double A = c - d, B = c;
            const double phiA = normal::pdf(A), phiB = normal::pdf(B);
            const double PhiA = normal::cdf(A), PhiB = normal::cdf(B);
            const double dPhi = PhiB - PhiA;
            const double w0 = (normal::cdf_integral(B) - normal::cdf_integral(A)) / d;
            const double t2 =
                ((B * B + 1.0) * dPhi - 2.0 * B * (phiA - phiB) - B * phiB + A * phiA) /
                (d * d * d);
            const double w1 = 0.5 * PhiA + 0.5 * d * t2;
            const double int_z3 = (A * A + 2.0) * phiA - (B * B + 2.0) * phiB;
            const double t3 = (B * B * B * dPhi - 3.0 * B * B * (phiA - phiB) +
                               3.0 * B * (dPhi - B * phiB + A * phiA) - int_z3) /
                              (d * d * d * d);
            const double v2 = PhiA / 3.0 + d * t3 / 3.0;
            total += h * std::exp(a) * (w0 + u * w1 + 0.5 * u * u * v2);
        }
    }
    return std::min(1.0, std::max(0.0, total));
}

double SmoothedDensity::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0))
        throw QuantileOutOfRange("quantile requires q in (0,1)");
    const auto [slo, shi] = base_.support();
    double lo = slo - 8.0 * lambda_;
    double hi = shi + 8.0 * lambda_;
    double step = std::max(lambda_, shi - slo);
    for (int i = 0; i < 200 && cdf(lo) > q; ++i) {
        lo -= step;
        step *= 2.0;
    }
    step = std::max(lambda_, shi - slo);
    for (int i = 0; i < 200 && cdf(hi) < q; ++i) {
        hi += step;
        step *= 2.0;
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = cdf(x);
        if (std::abs(f - q) <= 1e-10) return x;
        if (f > q)
            hi = x;
        else
            lo = x;
        const double dens = pdf(x);
        double next = dens > 0.0 ? x - (f - q) / dens : x;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) next = 0.5 * (lo + hi);
        x = next;
        if (hi - lo < 1e-15 * (1.0 + std::abs(x))) return x;
    }
    throw NonConvergence("quantile iteration did not converge", 200);
}

} // namespace lcshift
