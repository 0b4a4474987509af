#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rismod/montecarlo.hpp"

namespace rismod {

enum class JobKind { constellation, capacity, sep, theory };

std::string_view to_string(JobKind k) noexcept;
JobKind job_kind_from_string(std::string_view s);

/// Constellation jobs either place points from a drawn channel or from the
/// moment-formula block means.
enum class ConstellationMode { realization, mean };

/// A parsed job file. JSON layout (SNRs in dB; every field but "job",
/// "link.N" and "scheme" has a default):
///
///   {
///     "job": "sep",
///     "link":   {"N": 128, "K": 1, "kappa": 1.0 | "kappa_db": 0.0, "B": 3,
///                "ra_spacing_over_lambda": 0.5, "aoa_phi": 0.0},
///     "scheme": {"kind": "QAPSK", "M": 16, "V": 4},
///     "snr_db": [-30, -25, -20],
///     "trials_per_point": 10000, "channels_per_point": 100, "seed": 1,
///     "early_stop": false, "early_stop_errors": 100,
///     "capacity": {"monte_carlo": true, "gauss_hermite": true,
///                  "upper_bound": true, "quadrature_order": 16},
///     "theory":   {"mode": "channel_average", "realizations": 100,
///                  "apsk_geometry": "listed", "qapsk_scaling": "consistent",
///                  "capacity_ub": true, "quadrature_order": 16,
///                  "craig_abs_tol": 1e-12, "craig_max_depth": 40},
///     "constellation": {"mode": "realization", "channel_index": 0},
///     "output": "out.csv"
///   }
///
/// Unknown keys anywhere are rejected.
struct JobConfig {
    JobKind job = JobKind::sep;
    SweepSpec sweep;
    CapacityOptions capacity;
    TheoryOptions theory;
    ConstellationMode constellation_mode = ConstellationMode::realization;
    std::uint64_t channel_index = 0;
    std::optional<std::string> output;
    /// Input plus defaults, as canonical JSON text (sorted keys).
    std::string resolved;
};

/// Parses and validates. `seed` overrides the file's seed. `job`, when
/// given, fills a missing "job" field and must match a present one. Throws
/// ConfigError on syntax errors, unknown keys, type mismatches and every
/// module-level constraint.
JobConfig parse_job_config(std::string_view json_text, std::optional<std::uint64_t> seed = std::nullopt,
                           std::optional<JobKind> job = std::nullopt);

} // namespace rismod
