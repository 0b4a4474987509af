#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rismod/modulation.hpp"
#include "rismod/quadrature.hpp"

namespace rismod {

// ---------------------------------------------------------------------------
// Block-gain statistics
// ---------------------------------------------------------------------------

/// Moments of the real part of a phase-compensated block gain
/// X = sum_i alpha_i e^{j psi_i}, alpha_i unit-power Rician(kappa'),
/// psi_i ~ U(-pi/2^B, pi/2^B).
struct GainMoments {
    double mean = 0.0;    // E[X]
    double second = 0.0;  // E[X^2]
    int n_block = 0;
    int B = 0;
    double kappa_prime = 0.0;

    double variance() const noexcept { return second - mean * mean; }
};

/// E[cos psi] = (2^B / pi) sin(pi / 2^B).
double mean_cos_quantization_error(int B) noexcept;
/// E[cos^2 psi] = (1 + (2^B / 2pi) sin(2pi / 2^B)) / 2.
double mean_cos2_quantization_error(int B) noexcept;

/// mean   = n E[alpha] E[cos psi]
/// second = n (n - 1) (E[alpha] E[cos psi])^2 + n E[alpha^2] E[cos^2 psi]
/// with E[alpha] the unit-power Rician mean sigma sqrt(pi/2) L_{1/2}(-kappa')
/// and E[alpha^2] = 1.
GainMoments gain_moments(int n_block, int B, double kappa_prime);

struct GammaFit {
    double shape = 0.0;
    double scale = 0.0;
};

/// Moment-matched Gamma: shape = mean^2 / var, scale = var / mean.
/// Throws NumericalError when var <= 0 or mean <= 0.
GammaFit gamma_fit(const GainMoments& m);

// ---------------------------------------------------------------------------
// DCMC capacity
// ---------------------------------------------------------------------------

/// Mutual information (bits) of an equiprobable point set in CN(0, 1) noise
/// at y = sqrt(rho') z + n, with the 2-D noise expectation done by a P x P
/// Gauss-Hermite product rule. Throws NumericalError if the result leaves
/// [0, log2 M] by more than 1e-9; the raw value is returned otherwise.
double dcmc_capacity_gh(std::span<const cdouble> points, double rho_prime, const QuadratureRule& rule);

/// Statistical-CSI constellation: every block gain replaced by its mean
/// (real). PSK uses X = N E[alpha] E[cos psi] on M evenly spaced phases.
ConstellationSet mean_constellation(const SchemeConfig& scheme, int N, int B, double kappa_prime);

/// Capacity of the mean constellation. `blocks` lists the moments of every
/// block in partition order (APSK: M/V blocks; QAPSK: I blocks then Q blocks).
/// PSK is rejected.
double dcmc_capacity_ub(const SchemeConfig& scheme, std::span<const GainMoments> blocks, double rho_prime,
                        const QuadratureRule& rule);

/// Convenience form with identical blocks derived from (N, B, kappa').
double dcmc_capacity_ub(const SchemeConfig& scheme, int N, int B, double kappa_prime, double rho_prime,
                        const QuadratureRule& rule);

// ---------------------------------------------------------------------------
// Symbol error probability
// ---------------------------------------------------------------------------

struct CraigOptions {
    double abs_tol = 1e-12;
    int max_depth = 40;
};

/// (1 / 2pi) int_0^{theta_max} exp(-rho' b^2 sin^2 psi / sin^2(theta + psi)) d theta.
/// Probability that CN(0,1) noise, restricted to the angular sector
/// [0, theta_max] seen from the transmitted point, crosses the line at
/// distance b sin(psi). Throws NumericalError if the tolerance is not met.
double craig_wedge(double b, double theta_max, double psi, double rho_prime, const CraigOptions& opt = {});

struct Wedge {
    double b = 0.0;
    double theta = 0.0;
    double psi = 0.0;
    double multiplicity = 1.0;  // weight on the 1/2pi-normalized integral
};

struct DecisionGeometry {
    int layer = 0;  // 1-based
    std::vector<Wedge> wedges;
};

/// How the per-layer APSK decision wedges are assembled.
///  listed  - the closed-form per-layer (b_k, theta_k, psi_k) listing, including
///            the doubled sum on the outermost layer's outer rays.
///  voronoi - the exact Craig decomposition of each Voronoi cell, closed for
///            inner layers and open for the outermost; wedge angles sum to 2pi
///            (2pi - 2pi/V for the open outer cell).
enum class ApskGeometry { listed, voronoi };

/// Decision geometry of layer `layer` (1-based) for real block gains X.
/// Throws NumericalError naming the layer if an angle leaves its range.
DecisionGeometry apsk_layer_geometry(std::span<const double> X, int layer, int V,
                                     ApskGeometry form = ApskGeometry::listed);

/// Average over layers of the per-layer wedge sums.
double sep_apsk_theory(std::span<const double> X, double rho_prime, int M, int V,
                       ApskGeometry form = ApskGeometry::listed, const CraigOptions& opt = {});

/// Argument scaling of the nearest-neighbour Q terms.
///  consistent - Q(sqrt(rho'/2) X_l), the half-distance X_l/2 in per-dimension
///               noise variance 1/2, matching the diagonal term.
///  listed     - Q(sqrt(rho') X_l / 2), 3 dB pessimistic for this noise model.
enum class QapskScaling { consistent, listed };

/// High-SNR nearest-boundary approximation. XI, XQ hold all sqrt(M/V) gains
/// per branch (index 0 = layer 1, unused by the formula). Not clamped to 1.
double sep_qapsk_theory(std::span<const double> XI, std::span<const double> XQ, double rho_prime, int M, int V,
                        QapskScaling scaling = QapskScaling::consistent);

} // namespace rismod
