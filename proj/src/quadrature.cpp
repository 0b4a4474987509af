#include "rismod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rismod/errors.hpp"

namespace rismod {

QuadratureRule gauss_hermite(int order) {
    if (order < 1 || order > 200) throw ConfigError("Gauss-Hermite order must be in [1, 200]");
    const int n = order;
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2) z = 1.86 * z - 0.86 * x[0];
        else if (i == 3) z = 1.91 * z - 0.91 * x[1];
        else z = 2.0 * z - x[i - 2];

        double pp = 0.0;
        bool done = false;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) {
                done = true;
                break;
            }
        }
        if (!done) throw NumericalError("Gauss-Hermite Newton iteration did not converge");
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if (n % 2 == 1) x[m - 1] = 0.0;

    QuadratureRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // x is descending; store ascending.
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = x[n - 1 - i];
        rule.weights[i] = w[n - 1 - i];
    }
    return rule;
}

namespace {

struct Simpson {
    const std::function<double(double)>& f;
    int max_depth;
    bool converged = true;

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth,
                   double& err) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) {
            err += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        if (depth >= max_depth) {
            converged = false;
            err += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1, err) +
               recurse(m, b, fm, frm, fb, right, tol / 2.0, depth + 1, err);
    }
};

} // namespace

IntegrationResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                   int max_depth, int initial_panels, const std::vector<double>& breakpoints) {
    IntegrationResult res;
    if (b == a) return res;
    std::vector<double> cuts;
    initial_panels = std::max(initial_panels, 1);
    for (int i = 0; i <= initial_panels; ++i) cuts.push_back(a + (b - a) * i / initial_panels);
    for (double p : breakpoints)
        if (p > std::min(a, b) && p < std::max(a, b)) cuts.push_back(p);
    std::sort(cuts.begin(), cuts.end());
    if (b < a) std::reverse(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Simpson s{f, max_depth};
    const double total = std::abs(b - a);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        const double tol = abs_tol * std::abs(hi - lo) / total;
        res.value += s.recurse(lo, hi, flo, fmid, fhi, whole, tol, 0, res.error_estimate);
    }
    res.converged = s.converged;
    return res;
}

} // namespace rismod
