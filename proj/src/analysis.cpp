#include "rismod/analysis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rismod/errors.hpp"
#include "rismod/special.hpp"

namespace rismod {

using std::numbers::pi;

double mean_cos_quantization_error(int B) noexcept {
    const double L = std::ldexp(1.0, B);
    return L / pi * std::sin(pi / L);
}

double mean_cos2_quantization_error(int B) noexcept {
    const double L = std::ldexp(1.0, B);
    return (1.0 + L / (2.0 * pi) * std::sin(2.0 * pi / L)) / 2.0;
}

GainMoments gain_moments(int n_block, int B, double kappa_prime) {
    if (n_block < 1) throw ConfigError("gain_moments: n_block must be >= 1");
    if (B < 1) throw ConfigError("gain_moments: B must be >= 1");
    if (!(kappa_prime >= 0.0)) throw ConfigError("gain_moments: kappa' must be >= 0");
    const double per_element = rician_mean_amplitude(kappa_prime) * mean_cos_quantization_error(B);
    const double n = n_block;
    GainMoments m;
    m.n_block = n_block;
    m.B = B;
    m.kappa_prime = kappa_prime;
    m.mean = n * per_element;
    m.second = n * (n - 1.0) * per_element * per_element + n * mean_cos2_quantization_error(B);
    return m;
}

GammaFit gamma_fit(const GainMoments& m) {
    const double var = m.variance();
    if (!(m.mean > 0.0) || !(var > 0.0))
        throw NumericalError("gamma_fit: needs mean > 0 and second > mean^2 (mean=" + std::to_string(m.mean) +
                             ", var=" + std::to_string(var) + ")");
    return {m.mean * m.mean / var, var / m.mean};
}

double dcmc_capacity_gh(std::span<const cdouble> points, double rho_prime, const QuadratureRule& rule) {
    const std::size_t M = points.size();
    if (M < 2) throw ConfigError("dcmc_capacity_gh: need at least 2 points");
    if (!(rho_prime >= 0.0)) throw ConfigError("dcmc_capacity_gh: rho' must be >= 0");
    const double s = std::sqrt(rho_prime);
    std::vector<double> xr(M), xi(M);
    for (std::size_t m = 0; m < M; ++m) {
        xr[m] = s * points[m].real();
        xi[m] = s * points[m].imag();
    }

    double acc = 0.0;
    const int P = rule.order;
    for (int p1 = 0; p1 < P; ++p1) {
        const double t1 = rule.nodes[p1];
        for (int p2 = 0; p2 < P; ++p2) {
            const double t2 = rule.nodes[p2];
            double f = 0.0;
            for (std::size_t m1 = 0; m1 < M; ++m1) {
                double inner = 0.0;
                for (std::size_t m2 = 0; m2 < M; ++m2) {
                    const double dr = xr[m1] - xr[m2];
                    const double di = xi[m1] - xi[m2];
                    inner += std::exp(-2.0 * (t1 * dr + t2 * di) - (dr * dr + di * di));
                }
                f += std::log2(inner);
            }
            acc += rule.weights[p1] * rule.weights[p2] * f;
        }
    }
    const double log2M = std::log2(static_cast<double>(M));
    const double R = log2M - acc / (static_cast<double>(M) * pi);
    if (!(R >= -1e-9 && R <= log2M + 1e-9))
        throw NumericalError("dcmc_capacity_gh: result " + std::to_string(R) + " outside [0, log2 M]");
    return R;
}

ConstellationSet mean_constellation(const SchemeConfig& scheme, int N, int B, double kappa_prime) {
    scheme.validate(N, B);
    const auto part = partition_blocks(N, scheme);
    switch (scheme.kind) {
    case SchemeKind::psk: {
        const auto gm = gain_moments(N, B, kappa_prime);
        const cdouble X{gm.mean, 0.0};
        return assemble_constellation(scheme, std::span<const cdouble>(&X, 1));
    }
    case SchemeKind::apsk: {
        const auto gm = gain_moments(static_cast<int>(part.block_size()), B, kappa_prime);
        std::vector<cdouble> X(scheme.layers(), cdouble{gm.mean, 0.0});
        return assemble_constellation(scheme, X);
    }
    case SchemeKind::qapsk: {
        const auto gm = gain_moments(static_cast<int>(part.block_size()), B, kappa_prime);
        std::vector<cdouble> X(scheme.layers(), cdouble{gm.mean, 0.0});
        return assemble_constellation(scheme, X, X);
    }
    }
    return {};
}

double dcmc_capacity_ub(const SchemeConfig& scheme, std::span<const GainMoments> blocks, double rho_prime,
                        const QuadratureRule& rule) {
    std::vector<cdouble> means;
    for (const auto& b : blocks) means.emplace_back(b.mean, 0.0);
    switch (scheme.kind) {
    case SchemeKind::psk:
        throw ConfigError("capacity upper bound is defined for APSK and QAPSK only");
    case SchemeKind::apsk:
        if (static_cast<int>(means.size()) != scheme.layers())
            throw ConfigError("dcmc_capacity_ub: APSK needs M/V block moments");
        return dcmc_capacity_gh(assemble_constellation(scheme, means).points, rho_prime, rule);
    case SchemeKind::qapsk: {
        const auto s = static_cast<std::size_t>(scheme.layers());
        if (means.size() != 2 * s) throw ConfigError("dcmc_capacity_ub: QAPSK needs 2 sqrt(M/V) block moments");
        const std::span<const cdouble> all(means);
        return dcmc_capacity_gh(assemble_constellation(scheme, all.first(s), all.subspan(s)).points, rho_prime,
                                rule);
    }
    }
    return 0.0;
}

double dcmc_capacity_ub(const SchemeConfig& scheme, int N, int B, double kappa_prime, double rho_prime,
                        const QuadratureRule& rule) {
    scheme.validate(N, B);
    if (scheme.kind == SchemeKind::psk) throw ConfigError("capacity upper bound is defined for APSK and QAPSK only");
    const auto part = partition_blocks(N, scheme);
    std::vector<GainMoments> blocks(part.blocks.size(),
                                    gain_moments(static_cast<int>(part.block_size()), B, kappa_prime));
    return dcmc_capacity_ub(scheme, blocks, rho_prime, rule);
}

double craig_wedge(double b, double theta_max, double psi, double rho_prime, const CraigOptions& opt) {
    if (!(b > 0.0)) throw ConfigError("craig_wedge: b must be > 0");
    if (!(theta_max > 0.0 && theta_max < 2.0 * pi)) throw ConfigError("craig_wedge: theta_max must be in (0, 2pi)");
    if (!(psi > 0.0 && psi < pi)) throw ConfigError("craig_wedge: psi must be in (0, pi)");
    if (!(rho_prime >= 0.0)) throw ConfigError("craig_wedge: rho' must be >= 0");
    if (rho_prime == 0.0) return theta_max / (2.0 * pi);

    const double c = rho_prime * b * b * std::sin(psi) * std::sin(psi);
    auto f = [c, psi](double theta) {
        const double s = std::sin(theta + psi);
        if (s == 0.0) return 0.0;
        return std::exp(-c / (s * s));
    };
    // Integrand peaks where theta + psi = pi/2 (mod pi).
    const std::vector<double> peaks{pi / 2 - psi, 3 * pi / 2 - psi};
    const auto res = adaptive_simpson(f, 0.0, theta_max, opt.abs_tol * 2.0 * pi, opt.max_depth, 16, peaks);
    const double value = res.value / (2.0 * pi);
    if (!res.converged)
        throw NumericalError("craig_wedge: tolerance not reached (estimate " + std::to_string(value) + ")");
    return value;
}

namespace {

void check_wedge(const Wedge& w, int layer) {
    if (!(w.b > 0.0) || !(w.theta > 0.0 && w.theta < 2.0 * pi) || !(w.psi > 0.0 && w.psi < pi))
        throw NumericalError("invalid APSK decision geometry at layer " + std::to_string(layer) +
                             " (b=" + std::to_string(w.b) + ", theta=" + std::to_string(w.theta) +
                             ", psi=" + std::to_string(w.psi) + ")");
}

} // namespace

DecisionGeometry apsk_layer_geometry(std::span<const double> X, int layer, int V, ApskGeometry form) {
    const int L = static_cast<int>(X.size());
    if (L < 1) throw ConfigError("apsk_layer_geometry: no block gains");
    if (layer < 1 || layer > L) throw ConfigError("apsk_layer_geometry: layer out of range");
    if (V < 4) throw ConfigError("APSK SEP theory requires V >= 4: V=" + std::to_string(V));
    for (int i = 0; i < L; ++i)
        if (!(X[i] > 0.0))
            throw ConfigError("APSK SEP theory requires positive block gains (layer " + std::to_string(i + 1) + ")");

    const double tv = std::tan(pi / V);
    const double pv = pi / V;
    // prefix[k] = X_1 + ... + X_k
    std::vector<double> prefix(L + 1, 0.0);
    for (int i = 0; i < L; ++i) prefix[i + 1] = prefix[i] + X[i];
    // Boundary between ring k and ring k+1 (k >= 1 ... L-1), seen from either side.
    auto angle = [&](int k) { return std::atan((1.0 + 2.0 * prefix[k] / X[k]) * tv); };  // uses X_{k+1}
    auto corner = [&](int k) {
        const double half = X[k] / 2.0;
        const double c = prefix[k] + half;
        return std::sqrt(c * c * tv * tv + half * half);
    };

    DecisionGeometry geo;
    geo.layer = layer;
    auto& w = geo.wedges;
    const double x1 = X[0];

    if (L == 1) {
        w.push_back({x1, pi - pv, pv, 2.0});
    } else if (layer == 1) {
        const double a = angle(1);
        const double bo = corner(1);
        if (form == ApskGeometry::listed) {
            w.push_back({bo, pi - a, a - pv, 1.0});
            w.push_back({x1, 2.0 * a, pv, 1.0});
            w.push_back({bo, pi - a, pi / 2 - a, 1.0});
        } else {
            w.push_back({bo, pi - a, a - pv, 2.0});
            w.push_back({bo, 2.0 * a, pi / 2 - a, 1.0});
        }
    } else if (layer < L) {
        const double ai = angle(layer - 1);
        const double ao = angle(layer);
        const double bi = corner(layer - 1);
        const double bo = corner(layer);
        if (form == ApskGeometry::listed) {
            w.push_back({bo, pi - ai, ao - pv, 1.0});
            w.push_back({bi, 2.0 * ai, pi / 2 - ai, 1.0});
            w.push_back({bi, pi - ai, ai + pv, 1.0});
            w.push_back({bo, 2.0 * ao, pi / 2 - ao, 1.0});
        } else {
            w.push_back({bo, 2.0 * ao, pi / 2 - ao, 1.0});
            w.push_back({bi, 2.0 * ai, pi / 2 - ai, 1.0});
            w.push_back({bo, pi - ai - ao, ao - pv, 2.0});
        }
    } else {
        const double ai = angle(L - 1);
        const double bi = corner(L - 1);
        const double psi1 = ai + pv;
        w.push_back({bi, 2.0 * ai, pi / 2 - ai, 1.0});
        // Listed form: (1/pi) sum_{k=0}^{1} of a k-independent integral, i.e.
        // four 1/2pi-normalized copies; the exact cell has two.
        w.push_back({bi, pi - psi1, psi1, form == ApskGeometry::listed ? 4.0 : 2.0});
    }
    for (const auto& wedge : w) check_wedge(wedge, layer);
    return geo;
}

double sep_apsk_theory(std::span<const double> X, double rho_prime, int M, int V, ApskGeometry form,
                       const CraigOptions& opt) {
    if (V < 1 || M % V != 0 || static_cast<int>(X.size()) != M / V)
        throw ConfigError("sep_apsk_theory: need M/V block gains");
    const int L = M / V;
    double total = 0.0;
    for (int l = 1; l <= L; ++l) {
        const auto geo = apsk_layer_geometry(X, l, V, form);
        for (const auto& w : geo.wedges) total += w.multiplicity * craig_wedge(w.b, w.theta, w.psi, rho_prime, opt);
    }
    return total / L;
}

double sep_qapsk_theory(std::span<const double> XI, std::span<const double> XQ, double rho_prime, int M, int V,
                        QapskScaling scaling) {
    if (V < 4) throw ConfigError("QAPSK SEP theory requires V >= 4: V=" + std::to_string(V));
    if (M % V != 0) throw ConfigError("QAPSK SEP theory: V must divide M");
    const int MV = M / V;
    const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(MV))));
    if (s * s != MV) throw ConfigError("QAPSK SEP theory: M/V must be a perfect square");
    if (static_cast<int>(XI.size()) != s || static_cast<int>(XQ.size()) != s)
        throw ConfigError("QAPSK SEP theory: need sqrt(M/V) gains per branch");
    if (!(rho_prime >= 0.0)) throw ConfigError("QAPSK SEP theory: rho' must be >= 0");

    const double q = (V == 4) ? 4.0 : 2.0;
    const double a = scaling == QapskScaling::consistent ? std::sqrt(rho_prime / 2.0) : std::sqrt(rho_prime) / 2.0;
    const double c = std::cos(2.0 * pi / V);
    double adjacent = 0.0;
    double diagonal = 0.0;
    for (int l = 1; l < s; ++l) {
        const double xi = XI[l], xq = XQ[l];
        adjacent += q_function(a * xi) + q_function(a * xq);
        const double d2 = std::max(xi * xi + xq * xq - 2.0 * c * xi * xq, 0.0);
        diagonal += q_function(std::sqrt(rho_prime * d2 / 2.0));
    }
    return 2.0 / s * adjacent + q / MV * diagonal;
}

} // namespace rismod
