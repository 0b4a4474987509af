#include "rismod/special.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "rismod/errors.hpp"

namespace rismod {

double scaled_bessel_i(int nu, double y) {
    if (y < 0.0) throw ConfigError("scaled_bessel_i: negative argument");
    if (y <= 300.0) return std::exp(-y) * std::cyl_bessel_i(static_cast<double>(nu), y);
    // e^{-y} I_nu(y) ~ (2 pi y)^{-1/2} sum_k (-1)^k a_k / y^k,
    // a_k = prod_{j<=k} (4 nu^2 - (2j-1)^2) / (k! 8^k).
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 12; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * y);
        sum += term;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * y);
}

double laguerre_half(double x) {
    if (!(x >= 0.0)) throw ConfigError("laguerre_half: argument must be >= 0");
    const double h = x / 2.0;
    return (1.0 + x) * scaled_bessel_i(0, h) + x * scaled_bessel_i(1, h);
}

double rician_mean_amplitude(double kappa) {
    const double sigma = std::sqrt(1.0 / (2.0 * (1.0 + kappa)));
    return sigma * std::sqrt(std::numbers::pi / 2.0) * laguerre_half(kappa);
}

double q_function(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gamma_cdf(double shape, double scale, double x) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw ConfigError("gamma_cdf: shape and scale must be > 0");
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(shape, x / scale);
}

} // namespace rismod
