#include "rismod/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rismod/errors.hpp"

namespace rismod {

using std::numbers::pi;

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

void LinkConfig::validate() const {
    if (N < 1) throw ConfigError("N must be positive: N=" + std::to_string(N));
    if (K < 1) throw ConfigError("K must be positive: K=" + std::to_string(K));
    if (B < 1 || B > 24) throw ConfigError("B must be in [1, 24]: B=" + std::to_string(B));
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw ConfigError("kappa must be finite and >= 0: kappa=" + std::to_string(kappa));
    if (!(rho > 0.0)) throw ConfigError("rho must be > 0: rho=" + std::to_string(rho));
    if (!(ra_spacing_over_lambda > 0.0))
        throw ConfigError("ra_spacing_over_lambda must be > 0");
    if (!(aoa_phi >= -pi / 2 && aoa_phi <= pi / 2))
        throw ConfigError("aoa_phi must lie in [-pi/2, pi/2]: aoa_phi=" + std::to_string(aoa_phi));
}

EquivalentLink equivalent_link(const LinkConfig& cfg) {
    cfg.validate();
    const double k = cfg.kappa;
    const double K = cfg.K;
    return {((k * K + 1.0) / (1.0 + k)) * cfg.rho, K * k};
}

double channel_power(const LinkConfig& cfg) noexcept {
    const double K = cfg.K;
    return (cfg.kappa * K * K + K) / (1.0 + cfg.kappa);
}

ChannelRealization draw_channel(const LinkConfig& cfg, RngStream& rng) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.N);
    const double los_amp = std::sqrt(cfg.kappa / (1.0 + cfg.kappa));
    const double nlos_amp = std::sqrt(1.0 / (1.0 + cfg.kappa));
    const double ramp = 2.0 * pi * cfg.ra_spacing_over_lambda * std::sin(cfg.aoa_phi);

    std::vector<cdouble> steering(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) steering[k] = std::polar(1.0, ramp * k);

    ChannelRealization ch;
    ch.g.resize(n);
    ch.los.resize(n);
    ch.nlos.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ch.los[i] = static_cast<double>(cfg.K) * std::polar(1.0, 2.0 * pi * rng.uniform());
        cdouble acc{0.0, 0.0};
        for (const auto& w : steering) acc += rng.complex_normal(1.0) * w;
        ch.nlos[i] = acc;
        ch.g[i] = los_amp * ch.los[i] + nlos_amp * ch.nlos[i];
    }
    return ch;
}

std::vector<cdouble> normalized_gains(const ChannelRealization& ch, const LinkConfig& cfg) {
    const double s = 1.0 / std::sqrt(channel_power(cfg));
    std::vector<cdouble> out(ch.g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * ch.g[i];
    return out;
}

QuantizedPhase::QuantizedPhase(std::uint32_t index, int bits) : index_(index), bits_(bits) {
    if (bits < 1 || bits > 24) throw ConfigError("B must be in [1, 24]: B=" + std::to_string(bits));
    index_ = index & (levels() - 1);
}

double QuantizedPhase::value() const noexcept {
    return 2.0 * pi * static_cast<double>(index_) / static_cast<double>(levels());
}

QuantizedPhase QuantizedPhase::rotated(std::int64_t steps) const noexcept {
    const auto L = static_cast<std::int64_t>(levels());
    auto k = (static_cast<std::int64_t>(index_) + steps) % L;
    if (k < 0) k += L;
    QuantizedPhase out = *this;
    out.index_ = static_cast<std::uint32_t>(k);
    return out;
}

QuantizedPhase quantize_phase(cdouble z, int bits) {
    if (z == cdouble{0.0, 0.0}) throw NumericalError("undefined phase: quantize_phase of zero");
    const auto levels = 1u << bits;
    const double step = 2.0 * pi / levels;
    double t = std::arg(z) / step;  // in [-L/2, L/2]
    if (t < 0) t += levels;
    const double f = std::floor(t);
    const double r = t - f;
    constexpr double tie_eps = 1e-12;
    auto lo = static_cast<std::uint32_t>(f) % levels;
    const auto hi = (lo + 1) % levels;
    std::uint32_t k;
    if (r < 0.5 - tie_eps) k = lo;
    else if (r > 0.5 + tie_eps) k = hi;
    else k = std::min(lo, hi);
    return QuantizedPhase(k, bits);
}

double wrapped_phase_distance(double a, double b) noexcept {
    double d = std::fmod(std::abs(a - b), 2.0 * pi);
    return d > pi ? 2.0 * pi - d : d;
}

} // namespace rismod
