#pragma once

#include <vector>

#include "lcshift/lcmle.hpp"

namespace lcshift {

// Bandwidth from the moment-matching identity lambda^2 = pooled sample
// variance - variance of the fitted density. Throws NonPositiveBandwidth
// when round-off makes the difference <= 1e-12.
double compute_bandwidth(double base_variance, double pooled_sample_variance);

// A piecewise log-linear density convolved with a Gaussian kernel; strictly
// positive and smooth on all of R. Evaluation uses closed-form per-segment
// Gaussian-CDF expressions carried in log space, so density, score, and CDF
// stay accurate far into the tails. Immutable after construction.
class SmoothedDensity {
public:
    SmoothedDensity(PiecewiseLogLinearDensity base, double bandwidth);

    const PiecewiseLogLinearDensity& base() const { return base_; }
    double bandwidth() const { return lambda_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }

    double log_pdf(double x) const;
    double pdf(double x) const;

    // d/dx log pdf(x); non-increasing since the density is log-concave.
    double score(double x) const;

    double cdf(double x) const;

    // Inverse CDF to |cdf(x) - q| <= 1e-10 by bracketed Newton/bisection.
    // Throws QuantileOutOfRange unless 0 < q < 1.
    double quantile(double q) const;

private:
    struct Terms; // per-segment log contributions at a point

    PiecewiseLogLinearDensity base_;
    double lambda_;
    double lambda_sq_;
    double mean_;
    double variance_;
    // per-segment caches
    std::vector<double> seg_left_, seg_right_, seg_loga_, seg_slope_;
};

} // namespace lcshift
