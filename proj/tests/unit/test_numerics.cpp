#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rismod/errors.hpp"
#include "rismod/quadrature.hpp"
#include "rismod/special.hpp"

using namespace rismod;
using std::numbers::pi;

namespace {

// Composite Simpson with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Mean of a Rician amplitude with LoS amplitude nu and per-dimension
// variance s2, by integrating r * pdf(r).
double rician_mean_by_pdf(double nu, double s2) {
    auto pdf = [&](double r) {
        const double z = r * nu / s2;
        // I0(z) e^{-z} keeps the exponent bounded.
        return r / s2 * std::exp(-(r - nu) * (r - nu) / (2 * s2)) * std::cyl_bessel_i(0.0, z) * std::exp(-z);
    };
    const double hi = nu + 40 * std::sqrt(s2);
    return simpson([&](double r) { return r * pdf(r); }, 0.0, hi, 200000);
}

} // namespace

TEST_CASE("Laguerre half-order values") {
    CHECK(laguerre_half(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // kappa = 1 Rician with sigma = 1: nu^2 / (2 sigma^2) = 1.
    const double oracle = rician_mean_by_pdf(std::sqrt(2.0), 1.0) / std::sqrt(pi / 2);
    CHECK(laguerre_half(1.0) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(laguerre_half(1.0) == doctest::Approx(1.4464913440831).epsilon(1e-11));
    CHECK(laguerre_half(400.0) * std::sqrt(pi) / 2 / std::sqrt(400.0) == doctest::Approx(1.0).epsilon(2e-3));
    CHECK_THROWS_AS(laguerre_half(-1.0), ConfigError);
}

TEST_CASE("Laguerre stays finite and smooth across the expansion switch") {
    for (double x : {599.0, 600.0, 601.0, 1e4, 1e6}) {
        const double v = laguerre_half(x);
        CHECK(std::isfinite(v));
        // Leading behaviour 2 sqrt(x / pi).
        CHECK(v / (2 * std::sqrt(x / pi)) == doctest::Approx(1.0).epsilon(1e-3));
    }
    CHECK(scaled_bessel_i(0, 300.0 - 1e-9) == doctest::Approx(scaled_bessel_i(0, 300.0 + 1e-9)).epsilon(1e-12));
    CHECK(scaled_bessel_i(1, 300.0 - 1e-9) == doctest::Approx(scaled_bessel_i(1, 300.0 + 1e-9)).epsilon(1e-12));
}

TEST_CASE("unit-power Rician mean amplitude") {
    CHECK(rician_mean_amplitude(0.0) == doctest::Approx(std::sqrt(pi) / 2));
    for (double k : {0.5, 1.0, 4.0, 20.0}) {
        const double s2 = 1.0 / (2 * (1 + k));
        const double nu = std::sqrt(k / (1 + k));
        CHECK(rician_mean_amplitude(k) == doctest::Approx(rician_mean_by_pdf(nu, s2)).epsilon(1e-8));
    }
}

TEST_CASE("Gaussian tail") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
    CHECK(q_function(5.0) == doctest::Approx(2.866515718791939e-07).epsilon(1e-12));
    CHECK(q_function(-1.0) == doctest::Approx(1 - 0.15865525393145707).epsilon(1e-14));
}

TEST_CASE("Gamma CDF") {
    CHECK(gamma_cdf(1.0, 2.0, 3.0) == doctest::Approx(1 - std::exp(-1.5)).epsilon(1e-14));
    // shape 2: 1 - e^{-x}(1 + x)
    CHECK(gamma_cdf(2.0, 1.0, 1.7) == doctest::Approx(1 - std::exp(-1.7) * 2.7).epsilon(1e-14));
    CHECK(gamma_cdf(3.0, 1.0, 0.0) == 0.0);
}

TEST_CASE("Gauss-Hermite rules") {
    const auto r2 = gauss_hermite(2);
    CHECK(r2.nodes[0] == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(r2.nodes[1] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(r2.weights[0] == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-15));

    for (int P : {1, 5, 16, 24, 64}) {
        CAPTURE(P);
        const auto r = gauss_hermite(P);
        REQUIRE(static_cast<int>(r.nodes.size()) == P);
        for (int i = 1; i < P; ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
        // Exact for t^{2k}, 2k <= 2P - 1: integral = Gamma(k + 1/2).
        for (int k = 0; 2 * k <= 2 * P - 1 && k <= 20; ++k) {
            double s = 0;
            for (int i = 0; i < P; ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * k);
            CHECK(s == doctest::Approx(std::tgamma(k + 0.5)).epsilon(1e-12));
        }
        double odd = 0;
        for (int i = 0; i < P; ++i) odd += r.weights[i] * std::pow(r.nodes[i], 3);
        CHECK(std::abs(odd) < 1e-12);
    }
    CHECK_THROWS_AS(gauss_hermite(0), ConfigError);
}

TEST_CASE("adaptive Simpson") {
    auto r = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, pi, 1e-12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-11));
    // Narrow peak placed at a breakpoint.
    auto peak = [](double x) { return std::exp(-1e6 * (x - 0.3137) * (x - 0.3137)); };
    r = adaptive_simpson(peak, 0.0, 1.0, 1e-12, 40, 16, {0.3137});
    CHECK(r.value == doctest::Approx(std::sqrt(pi / 1e6)).epsilon(1e-8));
    // Depth exhausted on a discontinuity.
    r = adaptive_simpson([](double x) { return x < 0.123456 ? 0.0 : 1.0; }, 0.0, 1.0, 1e-15, 5);
    CHECK_FALSE(r.converged);
}
