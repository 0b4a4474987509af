#include "rismod/detection.hpp"

#include <cmath>
#include <limits>

#include "rismod/errors.hpp"

namespace rismod {

MlDetector::MlDetector(std::span<const cdouble> points, double rho_prime) {
    if (points.empty()) throw ConfigError("ML detection needs a non-empty constellation");
    if (!(rho_prime > 0.0)) throw ConfigError("rho' must be > 0");
    const double s = std::sqrt(rho_prime);
    scaled_.reserve(points.size());
    for (const auto& z : points) scaled_.push_back(s * z);
}

Detection MlDetector::detect(cdouble y) const noexcept {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scaled_.size(); ++i) {
        const double dr = y.real() - scaled_[i].real();
        const double di = y.imag() - scaled_[i].imag();
        const double d = dr * dr + di * di;
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return {best, best_d};
}

Detection ml_detect(const ReceivedSample& sample, const ConstellationSet& constellation) {
    return MlDetector(constellation.points, sample.rho_prime).detect(sample.y);
}

} // namespace rismod
