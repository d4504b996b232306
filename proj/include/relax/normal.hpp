#pragma once

namespace relax {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, computed through erfc so both tails keep relative accuracy.
double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura AS241, PPND16).
/// Throws ArgumentError unless 0 < p < 1.
double normal_quantile(double p);

}  // namespace relax
