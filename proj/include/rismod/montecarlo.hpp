#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rismod/analysis.hpp"
#include "rismod/channel.hpp"
#include "rismod/modulation.hpp"
#include "rismod/rng.hpp"

namespace rismod {

/// One sweep over receive SNR. `link.rho` is ignored; each grid point sets it.
///
/// Random streams (see RngStream for the word derivation):
///   channel c          stream_id_of({1, c})        shared by every SNR point
///   SEP noise (i, c)   stream_id_of({2, i, c})
///   MI noise (i, c)    stream_id_of({3, i, c})
///   Gamma draw r       stream_id_of({4, r})
/// so results do not depend on worker count or scheduling.
struct SweepSpec {
    LinkConfig link;
    SchemeConfig scheme;
    std::vector<double> snr_grid_db;
    std::uint64_t trials_per_point = 10000;  // symbols (SEP) or noise draws (capacity)
    std::uint32_t channels_per_point = 100;
    std::uint64_t master_seed = 1;
    bool early_stop = false;
    std::uint64_t early_stop_errors = 100;
    int workers = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct SweepPoint {
    double snr_db = 0.0;
    double rho_prime = 0.0;

    std::optional<double> sep_sim;
    std::optional<double> sep_stderr;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    std::uint32_t channels = 0;

    std::optional<double> sep_theory;

    std::optional<double> capacity_sim;
    std::optional<double> capacity_stderr;
    std::uint64_t noise_samples = 0;
    std::optional<double> capacity_gh;
    std::optional<double> capacity_gh_stderr;
    std::optional<double> capacity_ub;
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

enum class Metric { sep_sim, sep_theory, capacity_sim, capacity_gh, capacity_ub };

std::string_view to_string(Metric m) noexcept;
std::optional<double> metric_value(const SweepPoint& p, Metric m) noexcept;
/// Standard error paired with a metric, if the run recorded one.
std::optional<double> metric_stderr(const SweepPoint& p, Metric m) noexcept;

/// Channel index c of a sweep, scaled to unit per-element power.
std::vector<cdouble> draw_equivalent_gains(const LinkConfig& link, std::uint64_t master_seed, std::uint64_t c);

struct SepCount {
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
};

/// Uniform labels through y = sqrt(rho') z + n, n ~ CN(0,1), ML detection.
SepCount count_symbol_errors(std::span<const cdouble> points, double rho_prime, std::uint64_t trials,
                             RngStream& rng);

struct CapacityEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t samples = 0;
};

/// Monte Carlo mutual information of a fixed point set:
/// log2 M - (1/M) sum_{m1} log2 sum_{m2} exp(-|sqrt(rho')(z1 - z2) + n|^2 + |n|^2),
/// one noise draw shared by all m1 per sample.
CapacityEstimate estimate_capacity_mc(std::span<const cdouble> points, double rho_prime, std::uint64_t samples,
                                      RngStream& rng);

/// Pooled SEP per grid point over `channels_per_point` channel draws.
/// With early_stop, a point keeps the shortest channel prefix whose
/// cumulative error count reaches `early_stop_errors`.
SweepResult simulate_sep(const SweepSpec& spec);

struct CapacityOptions {
    bool monte_carlo = true;     // noise-averaged MI per channel draw
    bool gauss_hermite = true;   // quadrature MI per channel draw
    bool upper_bound = true;     // mean-constellation bound (APSK/QAPSK)
    int quadrature_order = 16;
};

SweepResult simulate_capacity(const SweepSpec& spec, const CapacityOptions& opt = {});

/// How block gains enter the SEP formulas.
///  channel_average - real parts of the block gains of channel draws
///                    0..realizations-1 (the same draws the simulator uses)
///  mean_gain       - every block at its moment-formula mean
///  gamma_average   - i.i.d. moment-matched Gamma block gains
enum class TheoryMode { channel_average, mean_gain, gamma_average };

std::string_view to_string(TheoryMode m) noexcept;
TheoryMode theory_mode_from_string(std::string_view s);

struct TheoryOptions {
    TheoryMode mode = TheoryMode::channel_average;
    std::uint32_t realizations = 100;
    ApskGeometry apsk_geometry = ApskGeometry::listed;
    QapskScaling qapsk_scaling = QapskScaling::consistent;
    bool capacity_ub = true;
    int quadrature_order = 16;
    CraigOptions craig;
};

/// SEP theory (and optionally the capacity bound) on the sweep grid.
/// APSK/QAPSK only.
SweepResult theory_sweep(const SweepSpec& spec, const TheoryOptions& opt = {});

/// First grid SNR (dB, linearly interpolated) where `proposed` rises above
/// `baseline` after being at or below it. Both sweeps must share the grid.
/// Empty when no such crossing exists on the grid.
std::optional<double> crossover_scan(const SweepResult& baseline, const SweepResult& proposed,
                                     Metric metric = Metric::capacity_gh);

/// SNR (dB) where a decreasing metric first crosses `level`, interpolated
/// linearly in (dB, log10 value). Empty if it never does on the grid.
std::optional<double> snr_at_level(const SweepResult& r, Metric metric, double level);

/// Gamma(shape, scale) variate (Marsaglia-Tsang).
double gamma_variate(double shape, double scale, RngStream& rng);

} // namespace rismod
