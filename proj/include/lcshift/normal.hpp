#pragma once

namespace lcshift::normal {

// Standard Gaussian density.
double pdf(double z);

// log of the standard Gaussian density, finite for all finite z.
double log_pdf(double z);

// Standard Gaussian CDF, computed through erfc so the lower tail keeps
// full relative accuracy down to the underflow threshold.
double cdf(double z);

// Upper tail P(Z > z).
double cdf_upper(double z);

// log P(Z > z), finite far beyond the point where cdf_upper underflows.
double log_cdf_upper(double z);

// Scaled complementary error function exp(x^2) erfc(x) for x >= 0.
double erfcx(double x);

// Inverse CDF on (0, 1). Throws QuantileOutOfRange otherwise.
double quantile(double p);

// log(cdf(b) - cdf(a)) for a < b, stable in both tails.
double log_cdf_diff(double a, double b);

// Antiderivative of the CDF: integral of cdf from -inf to z,
// equal to z*cdf(z) + pdf(z).
double cdf_integral(double z);

} // namespace lcshift::normal
