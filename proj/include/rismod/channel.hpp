#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rismod/rng.hpp"

namespace rismod {

using cdouble = std::complex<double>;

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

/// Physical and system parameters of one RIS-to-receiver link.
struct LinkConfig {
    int N = 64;                           // RIS elements
    int K = 1;                            // receive antennas
    double kappa = 1.0;                   // Rician factor, linear
    int B = 3;                            // phase resolution, bits
    double ra_spacing_over_lambda = 0.5;  // d / lambda
    double aoa_phi = 0.0;                 // radians
    double rho = 1.0;                     // receive SNR, linear

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

/// Single-antenna equivalent of the K-antenna statistical-CSI combiner.
struct EquivalentLink {
    double rho_prime;
    double kappa_prime;
};

EquivalentLink equivalent_link(const LinkConfig& cfg);

struct ChannelRealization {
    std::vector<cdouble> g;     // combined channel
    std::vector<cdouble> los;   // K * unit-modulus LoS vector
    std::vector<cdouble> nlos;  // sum over antennas of phase-ramped NLoS terms
};

/// Draws g = sqrt(k/(1+k)) K h_los + sqrt(1/(1+k)) sum_k h_k e^{j 2pi d (k-1) sin phi}.
/// LoS phases are i.i.d. uniform per element and realization.
ChannelRealization draw_channel(const LinkConfig& cfg, RngStream& rng);

/// E|g_n|^2 = (kappa K^2 + K) / (1 + kappa).
double channel_power(const LinkConfig& cfg) noexcept;

/// g scaled to unit per-element power; this is the channel seen by the
/// single-antenna equivalent receiver with (rho', kappa').
std::vector<cdouble> normalized_gains(const ChannelRealization& ch, const LinkConfig& cfg);

/// A phase restricted to the B-bit grid {k 2pi / 2^B}.
class QuantizedPhase {
public:
    QuantizedPhase() = default;
    QuantizedPhase(std::uint32_t index, int bits);

    std::uint32_t index() const noexcept { return index_; }
    int bits() const noexcept { return bits_; }
    std::uint32_t levels() const noexcept { return 1u << bits_; }
    double value() const noexcept;

    /// Advances the phase by `steps` grid steps (mod 2^B).
    QuantizedPhase rotated(std::int64_t steps) const noexcept;

    friend bool operator==(const QuantizedPhase&, const QuantizedPhase&) = default;

private:
    std::uint32_t index_ = 0;
    int bits_ = 1;
};

/// Nearest grid phase to arg(z). Exact midpoints go to the smaller grid
/// index (between 2^B - 1 and 0 that is 0). Throws NumericalError on z = 0.
QuantizedPhase quantize_phase(cdouble z, int bits);

/// Wrapped distance between two angles, in [0, pi].
double wrapped_phase_distance(double a, double b) noexcept;

} // namespace rismod
