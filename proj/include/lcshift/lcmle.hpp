#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace lcshift {

// A univariate sample with exact duplicates merged into weights.
struct WeightedSample {
    std::vector<double> points;  // strictly increasing
    std::vector<double> weights; // positive, sum to 1
    std::size_t raw_n = 0;       // observation count before tie merging
};

// Merge ties and normalize counts into probability weights.
// Throws FewerThanTwoDistinctPoints when the input has < 2 distinct values.
WeightedSample aggregate(const std::vector<double>& observations);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> cdf_at_knots;
};

// A density exp(phi) with phi piecewise linear and concave on [t_1, t_k],
// zero outside. Immutable after construction.
class PiecewiseLogLinearDensity {
public:
    // Validates: >= 2 strictly increasing knots, concave log-values and,
    // unless disabled, total mass 1 within 1e-8.
    PiecewiseLogLinearDensity(std::vector<double> knots,
                              std::vector<double> log_values,
                              bool enforce_normalization = true);

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& log_values() const { return log_values_; }
    const std::vector<double>& slopes() const { return slopes_; }
    std::pair<double, double> support() const {
        return {knots_.front(), knots_.back()};
    }
    double total_mass() const { return total_mass_; }

    // Linear interpolation of the log-values; -inf outside the support.
    double log_pdf(double x) const;
    double pdf(double x) const;
    double cdf(double x) const;

    // Mean, variance, and the CDF at each knot via closed-form segment
    // integrals of exp-linear pieces.
    Moments moments() const;

private:
    std::vector<double> knots_;
    std::vector<double> log_values_;
    std::vector<double> slopes_;
    std::vector<double> cum_mass_; // mass up to each knot
    double total_mass_ = 0.0;
};

struct FitOptions {
    double tol = 1e-10;      // KKT residual tolerance (scaled by knot range)
    int max_iterations = 200; // active-set steps
};

struct FitTrace {
    std::vector<double> objective; // after every accepted iterate
    int active_set_iterations = 0;
};

// Maximum-likelihood log-concave density of a weighted sample: maximizes
// sum w_i phi(x_i) - integral exp(phi) over concave phi. Active-set search
// over kink sets; each smooth subproblem solved by damped Newton.
// Throws NonConvergence if the KKT residuals fail to meet tol.
PiecewiseLogLinearDensity fit_lcmle(const WeightedSample& sample,
                                    const FitOptions& options = {},
                                    FitTrace* trace = nullptr);

// Weighted log-likelihood sum w_i log f(x_i) minus the total mass; the
// objective maximized by fit_lcmle.
double log_likelihood(const PiecewiseLogLinearDensity& density,
                      const WeightedSample& sample);

} // namespace lcshift
