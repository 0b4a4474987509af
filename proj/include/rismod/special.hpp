#pragma once

namespace rismod {

/// L_{1/2}(-x) = e^{-x/2} [(1 + x) I0(x/2) + x I1(x/2)] for x >= 0.
/// Throws ConfigError on negative x.
double laguerre_half(double x);

/// e^{-y} I_nu(y) for y >= 0, nu in {0, 1}. Switches to the large-argument
/// expansion above y = 300 so the product never overflows.
double scaled_bessel_i(int nu, double y);

/// Mean amplitude of a unit-power Rician variable with factor kappa:
/// sigma sqrt(pi/2) L_{1/2}(-kappa), sigma^2 = 1 / (2 (1 + kappa)).
double rician_mean_amplitude(double kappa);

/// Gaussian tail Q(x) = 0.5 erfc(x / sqrt 2).
double q_function(double x) noexcept;

/// CDF of Gamma(shape, scale) at x.
double gamma_cdf(double shape, double scale, double x);

} // namespace rismod
