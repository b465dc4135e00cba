#pragma once

namespace cherryvine::detail {

/// Standard normal distribution and quantile functions.
double normal_cdf(double x);
double normal_quantile(double p);

/// P(X <= a, Y <= b) for a standard bivariate normal with correlation rho.
/// Genz's adaptation of the Drezner-Wesolowsky method; absolute error around
/// 1e-15.
double bivariate_normal_cdf(double a, double b, double rho);

}  // namespace cherryvine::detail
