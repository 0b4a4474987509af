#pragma once

#include <functional>
#include <vector>

namespace rismod {

/// Gauss-Hermite rule for integrals against exp(-t^2).
struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;
};

/// Nodes are roots of H_P found by Newton iteration on the orthonormal
/// three-term recurrence (starting guesses from the usual asymptotic
/// formulas), iterated to 1e-14 relative; weights from the derivative identity.
/// Weight sum matches sqrt(pi) to ~1e-15 for P <= 64.
QuadratureRule gauss_hermite(int order);

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

/// Adaptive Simpson on [a, b] to absolute tolerance `abs_tol`. The interval
/// is first cut into `initial_panels` panels plus any `breakpoints` inside it
/// so narrow peaks cannot slip between the first samples.
IntegrationResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                   int max_depth = 40, int initial_panels = 16,
                                   const std::vector<double>& breakpoints = {});

} // namespace rismod
