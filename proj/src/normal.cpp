#include "lcshift/normal.hpp"

#include <cmath>
#include <limits>

#include "lcshift/errors.hpp"

namespace lcshift::normal {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvSqrtPi = 0.56418958354775628695;

} // namespace

double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double cdf_upper(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double erfcx(double x) {
    if (x < 6.0) return std::exp(x * x) * std::erfc(x);
    // Asymptotic expansion 1/(x sqrt(pi)) * sum (-1)^k (2k-1)!! / (2x^2)^k.
    // For x >= 6 the terms decay geometrically; truncate when negligible.
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 20; ++k) {
        term *= -(2 * k - 1) * inv2x2;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum * kInvSqrtPi / x;
}

double log_cdf_upper(double z) {
    if (z < 8.0) return std::log(cdf_upper(z));
    return std::log(0.5 * erfcx(z / kSqrt2)) - 0.5 * z * z;
}

double log_cdf_diff(double a, double b) {
    if (b < 0.0) return log_cdf_diff(-b, -a); // reflect into the upper tail
    if (a > 0.0) {
        // cdf(b) - cdf(a) = cdf_upper(a) - cdf_upper(b)
        const double la = log_cdf_upper(a);
        const double lb = log_cdf_upper(b);
        const double d = lb - la;
        if (d > -1e-17) return -std::numeric_limits<double>::infinity();
        return la + std::log1p(-std::exp(d));
    }
    // a <= 0 <= b: both CDFs are moderate; cancellation is benign.
    const double v = cdf(b) - cdf(a);
    if (v <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(v);
}

double cdf_integral(double z) {
    if (z < -40.0) return 0.0; // below double resolution of z*cdf+pdf
    return z * cdf(z) + pdf(z);
}

namespace {

// Rational initial guess for the inverse CDF (Acklam's coefficients),
// refined below with Halley steps against the erfc-based cdf.
double quantile_guess(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) return -quantile_guess(1.0 - p);
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw QuantileOutOfRange("normal quantile requires p in (0,1)");
    double x = quantile_guess(p);
    for (int i = 0; i < 3; ++i) {
        const double e = cdf(x) - p;
        const double f = pdf(x);
        if (f == 0.0) break;
        const double u = e / f;
        x -= u / (1.0 + 0.5 * x * u); // Halley step
    }
    return x;
}

} // namespace lcshift::normal
