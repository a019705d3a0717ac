#pragma once

#include <cmath>

// Stable building blocks for integrals of exp-linear segments.
// A segment carries log-density a + (b - a) * s over s in [0, 1] after
// rescaling by its width h; everything reduces to the moments
//   M_p(u) = integral_0^1 s^p exp(u s) ds,  u = b - a.
// Closed forms cancel catastrophically near u = 0, so a truncated series
// is used for |u| <= 1 (remainder below 1e-19 there).

namespace lcshift::expseg {

inline double m0(double u) {
    if (std::abs(u) <= 1.0) {
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 18; ++k) {
            term *= u / (k + 1);
            sum += term;
        }
        return sum;
    }
    return std::expm1(u) / u;
}

inline double m1(double u) {
    if (std::abs(u) <= 1.0) {
        double term = 0.5, sum = 0.5; // (k+1)/(k+2)! at k=0
        for (int k = 1; k <= 18; ++k) {
            term *= u * (k + 1) / (static_cast<double>(k) * (k + 2));
            sum += term;
        }
        return sum;
    }
    return (std::exp(u) * (u - 1.0) + 1.0) / (u * u);
}

inline double m2(double u) {
    if (std::abs(u) <= 1.0) {
        double term = 1.0 / 3.0, sum = 1.0 / 3.0; // (k+1)(k+2)/(k+3)! at k=0
        for (int k = 1; k <= 18; ++k) {
            term *= u * (k + 2) / (static_cast<double>(k) * (k + 3));
            sum += term;
        }
        return sum;
    }
    return (std::exp(u) * (u * u - 2.0 * u + 2.0) - 2.0) / (u * u * u);
}

// integral_0^1 (1 - s) exp(u s) ds = (e^u - 1 - u) / u^2; also the kernel of
// the integrated CDF over a segment.
inline double k2(double u) { return m0(u) - m1(u); }

// Mass of a segment of width h with endpoint log-values a, b:
// integral_0^h exp(a + (b-a) t/h) dt.
inline double segment_mass(double a, double b, double h) {
    return h * std::exp(a) * m0(b - a);
}

// First moment about the left endpoint: integral_0^h t exp(...) dt.
inline double segment_moment1(double a, double b, double h) {
    return h * h * std::exp(a) * m1(b - a);
}

// Second moment about the left endpoint.
inline double segment_moment2(double a, double b, double h) {
    return h * h * h * std::exp(a) * m2(b - a);
}

} // namespace lcshift::expseg
