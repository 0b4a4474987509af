#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rismod/channel.hpp"
#include "rismod/errors.hpp"

using namespace rismod;
using std::numbers::pi;

namespace {

LinkConfig link(int N, int K, double kappa) {
    LinkConfig c;
    c.N = N;
    c.K = K;
    c.kappa = kappa;
    return c;
}

// Nearest grid index by exhaustive scan; ties to the smaller index.
std::uint32_t brute_quantize(double phase, int bits) {
    const std::uint32_t L = 1u << bits;
    std::uint32_t best = 0;
    double best_d = 1e9;
    for (std::uint32_t k = 0; k < L; ++k) {
        const double d = wrapped_phase_distance(phase, 2 * pi * k / L);
        if (d < best_d - 1e-12) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

} // namespace

TEST_CASE("equivalent link") {
    auto c = link(64, 1, 1.0);
    auto e = equivalent_link(c);
    CHECK(e.rho_prime == doctest::Approx(1.0));
    CHECK(e.kappa_prime == doctest::Approx(1.0));

    c = link(64, 4, 1.0);
    e = equivalent_link(c);
    CHECK(e.rho_prime == doctest::Approx(2.5));
    CHECK(e.kappa_prime == doctest::Approx(4.0));

    c = link(64, 8, 0.0);
    e = equivalent_link(c);
    CHECK(e.rho_prime == doctest::Approx(1.0));
    CHECK(e.kappa_prime == 0.0);
}

TEST_CASE("LoS-only limit gives |g_n| = K") {
    for (int K : {1, 3}) {
        auto c = link(256, K, 1e9);
        RngStream rng(5, 1);
        const auto ch = draw_channel(c, rng);
        for (const auto& g : ch.g) CHECK(std::abs(g) == doctest::Approx(K).epsilon(1e-3));
    }
}

TEST_CASE("per-element power over one large draw") {
    {
        auto c = link(100000, 1, 0.0);
        RngStream rng(11, 2);
        const auto ch = draw_channel(c, rng);
        double p = 0;
        for (const auto& g : ch.g) p += std::norm(g);
        CHECK(p / c.N == doctest::Approx(1.0).epsilon(0.02));
    }
    {
        auto c = link(100000, 4, 1.0);
        RngStream rng(11, 3);
        const auto ch = draw_channel(c, rng);
        double p = 0;
        for (const auto& g : ch.g) p += std::norm(g);
        CHECK(p / c.N == doctest::Approx(10.0).epsilon(0.02));
        CHECK(channel_power(c) == doctest::Approx(10.0));
    }
}

TEST_CASE("multi-antenna channel matches single-antenna Rician statistics") {
    for (int K : {1, 2, 4}) {
        CAPTURE(K);
        auto c = link(200000, K, 0.5);
        c.aoa_phi = 0.4;
        RngStream rng(21, static_cast<std::uint64_t>(K));
        const auto g = normalized_gains(draw_channel(c, rng), c);
        const double n = static_cast<double>(g.size());
        const double kp = equivalent_link(c).kappa_prime;
        double sr = 0, si = 0, sr2 = 0, si2 = 0, s4 = 0, s8 = 0;
        for (const auto& x : g) {
            sr += x.real();
            si += x.imag();
            sr2 += x.real() * x.real();
            si2 += x.imag() * x.imag();
            const double a4 = std::norm(x) * std::norm(x);
            s4 += a4;
            s8 += a4 * a4;
        }
        // Uniform LoS phase: zero mean, variance 1/2 per dimension.
        CHECK(std::abs(sr / n) < 3 * std::sqrt(0.5 / n));
        CHECK(std::abs(si / n) < 3 * std::sqrt(0.5 / n));
        CHECK(std::abs(sr2 / n - 0.5) < 3 * std::sqrt(0.5 / n));
        CHECK(std::abs(si2 / n - 0.5) < 3 * std::sqrt(0.5 / n));
        // E|g|^4 of a unit-power Rician with factor kappa'.
        const double s2 = 1.0 / (1.0 + kp), los = kp / (1.0 + kp);
        const double m4 = los * los + 4 * los * s2 + 2 * s2 * s2;
        const double se = std::sqrt((s8 / n - (s4 / n) * (s4 / n)) / n);
        CHECK(std::abs(s4 / n - m4) < 3 * se);
    }
}

TEST_CASE("channel draw is deterministic per stream") {
    auto c = link(64, 2, 1.0);
    RngStream a(1, 5), b(1, 5);
    const auto x = draw_channel(c, a), y = draw_channel(c, b);
    CHECK(x.g == y.g);
    CHECK(x.los == y.los);
    CHECK(x.nlos == y.nlos);
}

TEST_CASE("quantize_phase examples") {
    CHECK(quantize_phase(std::polar(1.0, 0.3), 3).index() == 0);
    CHECK(quantize_phase(std::polar(1.0, pi), 1).index() == 1);
    CHECK(quantize_phase(std::polar(1.0, pi), 1).value() == doctest::Approx(pi));
    // Exact midpoints go to the smaller index.
    CHECK(quantize_phase(cdouble(1.0, 1.0), 2).index() == 0);
    CHECK(quantize_phase(cdouble(-1.0, 1.0), 2).index() == 1);
    CHECK(quantize_phase(cdouble(1.0, -1.0), 2).index() == 0);
    CHECK_THROWS_AS(quantize_phase(cdouble(0.0, 0.0), 3), NumericalError);
}

TEST_CASE("quantizer agrees with exhaustive search and respects the error bound") {
    RngStream rng(77, 1);
    for (int B = 1; B <= 6; ++B) {
        int mismatches = 0, violations = 0;
        for (int i = 0; i < 20000; ++i) {
            const double phase = 2 * pi * rng.uniform() - pi;
            const auto q = quantize_phase(std::polar(1.0, phase), B);
            if (q.index() != brute_quantize(phase, B)) ++mismatches;
            if (wrapped_phase_distance(phase, q.value()) > pi / (1 << B) + 1e-12) ++violations;
        }
        CHECK(mismatches == 0);
        CHECK(violations == 0);
    }
}

TEST_CASE("quantized phase rotation wraps on the grid") {
    const QuantizedPhase q(6, 3);
    CHECK(q.rotated(2).index() == 0);
    CHECK(q.rotated(-7).index() == 7);
    CHECK(q.rotated(16).index() == 6);
}

TEST_CASE("link validation") {
    auto c = link(64, 1, 1.0);
    c.B = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = link(0, 1, 1.0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = link(64, 0, 1.0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = link(64, 1, -1.0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = link(64, 1, 1.0);
    c.aoa_phi = 2.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("dB conversions") {
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(-30.0) == doctest::Approx(1e-3));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
}
