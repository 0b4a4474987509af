#include "rismod/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rismod/detection.hpp"
#include "rismod/errors.hpp"

namespace rismod {

namespace {

constexpr std::uint64_t kChannelTag = 1;
constexpr std::uint64_t kSepNoiseTag = 2;
constexpr std::uint64_t kMiNoiseTag = 3;
constexpr std::uint64_t kGammaTag = 4;

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const auto hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs f(i) for i in [0, n) on up to `workers` threads. f writes only to
// slot i of caller-owned storage. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
    workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const auto i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                    return;
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

std::vector<double> rho_primes(const SweepSpec& spec) {
    std::vector<double> out;
    for (double db : spec.snr_grid_db) {
        auto link = spec.link;
        link.rho = db_to_linear(db);
        out.push_back(equivalent_link(link).rho_prime);
    }
    return out;
}

std::uint64_t share(std::uint64_t total, std::uint32_t parts, std::uint32_t c) {
    return total / parts + (c < total % parts ? 1 : 0);
}

SweepResult empty_result(const SweepSpec& spec, const std::vector<double>& rp) {
    SweepResult r;
    for (std::size_t i = 0; i < spec.snr_grid_db.size(); ++i) {
        SweepPoint p;
        p.snr_db = spec.snr_grid_db[i];
        p.rho_prime = rp[i];
        r.points.push_back(p);
    }
    return r;
}

// Real parts of the block gains of a constellation, in partition order.
void real_gains(const ConstellationSet& cs, std::vector<double>& xi, std::vector<double>& xq) {
    xi.clear();
    xq.clear();
    if (cs.scheme.kind == SchemeKind::apsk) {
        for (const auto& x : cs.block_gains) xi.push_back(x.real());
    } else {
        for (const auto& x : cs.block_gains_i) xi.push_back(x.real());
        for (const auto& x : cs.block_gains_q) xq.push_back(x.real());
    }
}

} // namespace

void SweepSpec::validate() const {
    link.validate();
    scheme.validate(link.N, link.B);
    if (snr_grid_db.empty()) throw ConfigError("SNR grid must not be empty");
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        if (!std::isfinite(snr_grid_db[i])) throw ConfigError("SNR grid values must be finite");
        if (i > 0 && !(snr_grid_db[i] > snr_grid_db[i - 1]))
            throw ConfigError("SNR grid must be strictly increasing");
    }
    if (trials_per_point < 1) throw ConfigError("trials_per_point must be >= 1");
    if (channels_per_point < 1) throw ConfigError("channels_per_point must be >= 1");
    if (trials_per_point < channels_per_point)
        throw ConfigError("trials_per_point must be >= channels_per_point");
    if (early_stop && early_stop_errors < 1) throw ConfigError("early_stop_errors must be >= 1");
}

std::string_view to_string(Metric m) noexcept {
    switch (m) {
    case Metric::sep_sim: return "sep_sim";
    case Metric::sep_theory: return "sep_theory";
    case Metric::capacity_sim: return "capacity_sim";
    case Metric::capacity_gh: return "capacity_gh";
    case Metric::capacity_ub: return "capacity_theory_ub";
    }
    return "?";
}

std::optional<double> metric_value(const SweepPoint& p, Metric m) noexcept {
    switch (m) {
    case Metric::sep_sim: return p.sep_sim;
    case Metric::sep_theory: return p.sep_theory;
    case Metric::capacity_sim: return p.capacity_sim;
    case Metric::capacity_gh: return p.capacity_gh;
    case Metric::capacity_ub: return p.capacity_ub;
    }
    return std::nullopt;
}

std::optional<double> metric_stderr(const SweepPoint& p, Metric m) noexcept {
    switch (m) {
    case Metric::sep_sim: return p.sep_stderr;
    case Metric::capacity_sim: return p.capacity_stderr;
    case Metric::capacity_gh: return p.capacity_gh_stderr;
    default: return std::nullopt;
    }
}

std::vector<cdouble> draw_equivalent_gains(const LinkConfig& link, std::uint64_t master_seed, std::uint64_t c) {
    RngStream rng(master_seed, stream_id_of({kChannelTag, c}));
    return normalized_gains(draw_channel(link, rng), link);
}

SepCount count_symbol_errors(std::span<const cdouble> points, double rho_prime, std::uint64_t trials,
                             RngStream& rng) {
    const MlDetector det(points, rho_prime);
    const auto scaled = det.scaled_points();
    SepCount out;
    out.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto label = rng.uniform_index(scaled.size());
        const cdouble y = scaled[label] + rng.complex_normal(1.0);
        if (det.detect(y).label != static_cast<int>(label)) ++out.errors;
    }
    return out;
}

CapacityEstimate estimate_capacity_mc(std::span<const cdouble> points, double rho_prime, std::uint64_t samples,
                                      RngStream& rng) {
    const std::size_t M = points.size();
    if (M < 2) throw ConfigError("capacity estimate needs at least 2 points");
    const double s = std::sqrt(rho_prime);
    std::vector<cdouble> z(M);
    for (std::size_t m = 0; m < M; ++m) z[m] = s * points[m];
    const double log2M = std::log2(static_cast<double>(M));

    CapacityEstimate est;
    est.samples = samples;
    for (std::uint64_t k = 0; k < samples; ++k) {
        const cdouble n = rng.complex_normal(1.0);
        const double nn = std::norm(n);
        double acc = 0.0;
        for (std::size_t m1 = 0; m1 < M; ++m1) {
            double inner = 0.0;
            for (std::size_t m2 = 0; m2 < M; ++m2) {
                const double dr = z[m1].real() - z[m2].real() + n.real();
                const double di = z[m1].imag() - z[m2].imag() + n.imag();
                inner += std::exp(nn - (dr * dr + di * di));
            }
            acc += std::log2(inner);
        }
        const double v = log2M - acc / static_cast<double>(M);
        est.sum += v;
        est.sum_sq += v * v;
    }
    if (samples > 0) {
        est.mean = est.sum / static_cast<double>(samples);
        if (samples > 1) {
            const double var = (est.sum_sq - est.sum * est.mean) / static_cast<double>(samples - 1);
            est.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
        }
    }
    return est;
}

SweepResult simulate_sep(const SweepSpec& spec) {
    spec.validate();
    const auto rp = rho_primes(spec);
    const std::size_t P = rp.size();
    const std::uint32_t C = spec.channels_per_point;
    const int workers = resolve_workers(spec.workers);
    const auto part = partition_blocks(spec.link.N, spec.scheme);

    // counts[c][i]
    std::vector<std::vector<SepCount>> counts(C, std::vector<SepCount>(P));
    std::vector<std::uint64_t> cumulative(P, 0);
    std::vector<std::uint32_t> used_channels(P, 0);
    std::vector<bool> stopped(P, false);

    const std::uint32_t batch = spec.early_stop ? static_cast<std::uint32_t>(std::max(workers, 1)) : C;
    for (std::uint32_t start = 0; start < C; start += batch) {
        const std::uint32_t stop = std::min(C, start + batch);
        const auto active = stopped;
        parallel_for(stop - start, workers, [&](std::size_t k) {
            const auto c = static_cast<std::uint32_t>(start + k);
            const auto g = draw_equivalent_gains(spec.link, spec.master_seed, c);
            const auto cs = received_signal_set(g, spec.scheme, part, spec.link.B);
            const auto n_trials = share(spec.trials_per_point, C, c);
            for (std::size_t i = 0; i < P; ++i) {
                if (active[i]) continue;
                RngStream rng(spec.master_seed, stream_id_of({kSepNoiseTag, i, c}));
                counts[c][i] = count_symbol_errors(cs.points, rp[i], n_trials, rng);
            }
        });
        // Merge in channel order; a point stops at the first channel that
        // brings its cumulative errors to the target.
        for (std::uint32_t c = start; c < stop; ++c) {
            for (std::size_t i = 0; i < P; ++i) {
                if (stopped[i]) continue;
                cumulative[i] += counts[c][i].errors;
                used_channels[i] = c + 1;
                if (spec.early_stop && cumulative[i] >= spec.early_stop_errors) stopped[i] = true;
            }
        }
        if (std::all_of(stopped.begin(), stopped.end(), [](bool b) { return b; })) break;
    }

    auto result = empty_result(spec, rp);
    for (std::size_t i = 0; i < P; ++i) {
        auto& p = result.points[i];
        for (std::uint32_t c = 0; c < used_channels[i]; ++c) {
            p.trials += counts[c][i].trials;
            p.errors += counts[c][i].errors;
        }
        p.channels = used_channels[i];
        const double sep = static_cast<double>(p.errors) / static_cast<double>(p.trials);
        p.sep_sim = sep;
        p.sep_stderr = std::sqrt(sep * (1.0 - sep) / static_cast<double>(p.trials));
    }
    return result;
}

SweepResult simulate_capacity(const SweepSpec& spec, const CapacityOptions& opt) {
    spec.validate();
    const auto rp = rho_primes(spec);
    const std::size_t P = rp.size();
    const std::uint32_t C = spec.channels_per_point;
    const int workers = resolve_workers(spec.workers);
    const auto part = partition_blocks(spec.link.N, spec.scheme);
    const auto rule = gauss_hermite(opt.quadrature_order);

    std::vector<std::vector<CapacityEstimate>> mc(C, std::vector<CapacityEstimate>(P));
    std::vector<std::vector<double>> gh(C, std::vector<double>(P, 0.0));
    parallel_for(C, workers, [&](std::size_t k) {
        const auto c = static_cast<std::uint32_t>(k);
        const auto g = draw_equivalent_gains(spec.link, spec.master_seed, c);
        const auto cs = received_signal_set(g, spec.scheme, part, spec.link.B);
        const auto n_samples = share(spec.trials_per_point, C, c);
        for (std::size_t i = 0; i < P; ++i) {
            if (opt.monte_carlo) {
                RngStream rng(spec.master_seed, stream_id_of({kMiNoiseTag, i, c}));
                mc[c][i] = estimate_capacity_mc(cs.points, rp[i], n_samples, rng);
            }
            if (opt.gauss_hermite) gh[c][i] = dcmc_capacity_gh(cs.points, rp[i], rule);
        }
    });

    auto result = empty_result(spec, rp);
    const bool ub = opt.upper_bound && spec.scheme.kind != SchemeKind::psk;
    const double kappa_prime = equivalent_link(spec.link).kappa_prime;
    for (std::size_t i = 0; i < P; ++i) {
        auto& p = result.points[i];
        p.channels = C;
        if (opt.monte_carlo) {
            double sum = 0.0;
            std::uint64_t n = 0;
            for (std::uint32_t c = 0; c < C; ++c) {
                sum += mc[c][i].sum;
                n += mc[c][i].samples;
            }
            const double mean = sum / static_cast<double>(n);
            double se2 = 0.0;
            if (C >= 2) {
                // Cluster-robust: channel draws are the independent units.
                for (std::uint32_t c = 0; c < C; ++c) {
                    const double dev = mc[c][i].sum - static_cast<double>(mc[c][i].samples) * mean;
                    se2 += dev * dev;
                }
                se2 *= static_cast<double>(C) / (static_cast<double>(C) - 1.0) / (static_cast<double>(n) * n);
            } else {
                se2 = mc[0][i].stderr_ * mc[0][i].stderr_;
            }
            p.capacity_sim = mean;
            p.capacity_stderr = std::sqrt(se2);
            p.noise_samples = n;
        }
        if (opt.gauss_hermite) {
            double sum = 0.0, sq = 0.0;
            for (std::uint32_t c = 0; c < C; ++c) {
                sum += gh[c][i];
                sq += gh[c][i] * gh[c][i];
            }
            const double mean = sum / C;
            p.capacity_gh = mean;
            p.capacity_gh_stderr =
                C >= 2 ? std::sqrt(std::max(sq - sum * mean, 0.0) / (C - 1.0) / C) : 0.0;
        }
        if (ub) p.capacity_ub = dcmc_capacity_ub(spec.scheme, spec.link.N, spec.link.B, kappa_prime, rp[i], rule);
    }
    return result;
}

std::string_view to_string(TheoryMode m) noexcept {
    switch (m) {
    case TheoryMode::channel_average: return "channel_average";
    case TheoryMode::mean_gain: return "mean_gain";
    case TheoryMode::gamma_average: return "gamma_average";
    }
    return "?";
}

TheoryMode theory_mode_from_string(std::string_view s) {
    if (s == "channel_average") return TheoryMode::channel_average;
    if (s == "mean_gain") return TheoryMode::mean_gain;
    if (s == "gamma_average") return TheoryMode::gamma_average;
    throw ConfigError("unknown theory mode: " + std::string(s));
}

double gamma_variate(double shape, double scale, RngStream& rng) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw ConfigError("gamma_variate: shape and scale must be > 0");
    if (shape < 1.0) {
        const double u = 1.0 - rng.uniform();
        return gamma_variate(shape + 1.0, scale, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = 1.0 - rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

SweepResult theory_sweep(const SweepSpec& spec, const TheoryOptions& opt) {
    spec.validate();
    const auto& scheme = spec.scheme;
    if (scheme.kind == SchemeKind::psk) throw ConfigError("SEP theory covers APSK and QAPSK only");
    if (scheme.V < 4) throw ConfigError("SEP theory requires V >= 4: V=" + std::to_string(scheme.V));
    if (opt.mode != TheoryMode::mean_gain && opt.realizations < 1)
        throw ConfigError("theory realizations must be >= 1");

    const auto rp = rho_primes(spec);
    const auto part = partition_blocks(spec.link.N, scheme);
    const double kappa_prime = equivalent_link(spec.link).kappa_prime;
    const auto gm = gain_moments(static_cast<int>(part.block_size()), spec.link.B, kappa_prime);
    const auto per_branch = static_cast<std::size_t>(scheme.layers());

    // Gain sets: first = APSK gains or QAPSK I gains, second = QAPSK Q gains.
    std::vector<std::pair<std::vector<double>, std::vector<double>>> sets;
    switch (opt.mode) {
    case TheoryMode::mean_gain: {
        std::vector<double> x(per_branch, gm.mean);
        sets.emplace_back(x, scheme.kind == SchemeKind::qapsk ? x : std::vector<double>{});
        break;
    }
    case TheoryMode::channel_average: {
        sets.resize(opt.realizations);
        parallel_for(opt.realizations, resolve_workers(spec.workers), [&](std::size_t r) {
            const auto g = draw_equivalent_gains(spec.link, spec.master_seed, r);
            const auto cs = received_signal_set(g, scheme, part, spec.link.B);
            real_gains(cs, sets[r].first, sets[r].second);
        });
        break;
    }
    case TheoryMode::gamma_average: {
        const auto fit = gamma_fit(gm);
        for (std::uint32_t r = 0; r < opt.realizations; ++r) {
            RngStream rng(spec.master_seed, stream_id_of({kGammaTag, r}));
            std::vector<double> a(per_branch), b;
            for (auto& x : a) x = gamma_variate(fit.shape, fit.scale, rng);
            if (scheme.kind == SchemeKind::qapsk) {
                b.resize(per_branch);
                for (auto& x : b) x = gamma_variate(fit.shape, fit.scale, rng);
            }
            sets.emplace_back(std::move(a), std::move(b));
        }
        break;
    }
    }

    const auto rule = gauss_hermite(opt.quadrature_order);
    auto result = empty_result(spec, rp);
    std::vector<double> sep(rp.size(), 0.0);
    parallel_for(rp.size(), resolve_workers(spec.workers), [&](std::size_t i) {
        double acc = 0.0;
        for (const auto& [xa, xb] : sets) {
            acc += scheme.kind == SchemeKind::apsk
                       ? sep_apsk_theory(xa, rp[i], scheme.M, scheme.V, opt.apsk_geometry, opt.craig)
                       : sep_qapsk_theory(xa, xb, rp[i], scheme.M, scheme.V, opt.qapsk_scaling);
        }
        sep[i] = acc / static_cast<double>(sets.size());
    });
    for (std::size_t i = 0; i < rp.size(); ++i) {
        result.points[i].sep_theory = sep[i];
        result.points[i].channels = static_cast<std::uint32_t>(sets.size());
        if (opt.capacity_ub)
            result.points[i].capacity_ub =
                dcmc_capacity_ub(scheme, spec.link.N, spec.link.B, kappa_prime, rp[i], rule);
    }
    return result;
}

std::optional<double> crossover_scan(const SweepResult& baseline, const SweepResult& proposed, Metric metric) {
    if (baseline.points.size() != proposed.points.size())
        throw ConfigError("crossover_scan: sweeps must share the SNR grid");
    std::optional<double> prev_diff;
    for (std::size_t i = 0; i < baseline.points.size(); ++i) {
        const auto& b = baseline.points[i];
        const auto& p = proposed.points[i];
        if (b.snr_db != p.snr_db) throw ConfigError("crossover_scan: sweeps must share the SNR grid");
        const auto vb = metric_value(b, metric);
        const auto vp = metric_value(p, metric);
        if (!vb || !vp) throw ConfigError("crossover_scan: metric missing from sweep");
        const double diff = *vp - *vb;
        if (prev_diff && *prev_diff <= 0.0 && diff > 0.0) {
            const double s0 = baseline.points[i - 1].snr_db;
            const double s1 = b.snr_db;
            return s0 + (s1 - s0) * (-*prev_diff) / (diff - *prev_diff);
        }
        prev_diff = diff;
    }
    return std::nullopt;
}

std::optional<double> snr_at_level(const SweepResult& r, Metric metric, double level) {
    for (std::size_t i = 1; i < r.points.size(); ++i) {
        const auto v0 = metric_value(r.points[i - 1], metric);
        const auto v1 = metric_value(r.points[i], metric);
        if (!v0 || !v1) continue;
        if (*v0 >= level && *v1 < level) {
            const double s0 = r.points[i - 1].snr_db, s1 = r.points[i].snr_db;
            if (*v1 <= 0.0) return s0 + (s1 - s0) * (*v0 - level) / (*v0 - *v1);
            const double l0 = std::log10(*v0), l1 = std::log10(*v1), lt = std::log10(level);
            return s0 + (s1 - s0) * (l0 - lt) / (l0 - l1);
        }
    }
    return std::nullopt;
}

} // namespace rismod
