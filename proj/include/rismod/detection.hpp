#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rismod/modulation.hpp"

namespace rismod {

struct ReceivedSample {
    cdouble y;
    double rho_prime;
};

struct Detection {
    int label;      // integer symbol label
    double metric;  // |y - sqrt(rho') z_label|^2
};

/// Exhaustive minimum-distance (ML under AWGN) search. Ties go to the
/// smallest label.
Detection ml_detect(const ReceivedSample& sample, const ConstellationSet& constellation);

/// Same rule with the sqrt(rho') scaling done once, for repeated use at a
/// fixed SNR.
class MlDetector {
public:
    MlDetector(std::span<const cdouble> points, double rho_prime);

    Detection detect(cdouble y) const noexcept;
    std::span<const cdouble> scaled_points() const noexcept { return scaled_; }

private:
    std::vector<cdouble> scaled_;
};

} // namespace rismod
