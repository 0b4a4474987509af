#include "rismod/job_config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "rismod/errors.hpp"

namespace rismod {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    const std::set<std::string_view> ok(allowed);
    for (const auto& [k, v] : obj.items()) {
        if (!ok.contains(k)) throw ConfigError("unknown field: " + std::string(where) + "." + k);
    }
}

// Fetches obj[key] (inserting the default when absent) with a type check.
template <class T>
T take(json& obj, const char* key, std::string_view where, T fallback) {
    if (!obj.contains(key)) obj[key] = fallback;
    const auto& v = obj[key];
    const std::string name = std::string(where) + "." + key;
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(name + " must be a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
                    throw ConfigError(name + " must be >= 0");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(name + " must be a number");
        } else {
            if (!v.is_string()) throw ConfigError(name + " must be a string");
        }
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(name + ": " + e.what());
    }
}

template <class T>
T take_required(json& obj, const char* key, std::string_view where) {
    if (!obj.contains(key)) throw ConfigError("missing field: " + std::string(where) + "." + key);
    return take<T>(obj, key, where, T{});
}

json& section(json& root, const char* key) {
    if (!root.contains(key)) root[key] = json::object();
    return root[key];
}

int to_int(std::int64_t v, const char* name) {
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError(std::string(name) + " out of range");
    return static_cast<int>(v);
}

ApskGeometry apsk_geometry_from_string(const std::string& s) {
    if (s == "listed") return ApskGeometry::listed;
    if (s == "voronoi") return ApskGeometry::voronoi;
    throw ConfigError("unknown theory.apsk_geometry: " + s);
}

QapskScaling qapsk_scaling_from_string(const std::string& s) {
    if (s == "consistent") return QapskScaling::consistent;
    if (s == "listed") return QapskScaling::listed;
    throw ConfigError("unknown theory.qapsk_scaling: " + s);
}

} // namespace

std::string_view to_string(JobKind k) noexcept {
    switch (k) {
    case JobKind::constellation: return "constellation";
    case JobKind::capacity: return "capacity";
    case JobKind::sep: return "sep";
    case JobKind::theory: return "theory";
    }
    return "?";
}

JobKind job_kind_from_string(std::string_view s) {
    if (s == "constellation") return JobKind::constellation;
    if (s == "capacity") return JobKind::capacity;
    if (s == "sep") return JobKind::sep;
    if (s == "theory") return JobKind::theory;
    throw ConfigError("unknown job kind: " + std::string(s));
}

JobConfig parse_job_config(std::string_view json_text, std::optional<std::uint64_t> seed,
                           std::optional<JobKind> job) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root, "config",
                   {"job", "link", "scheme", "snr_db", "trials_per_point", "channels_per_point", "seed",
                    "early_stop", "early_stop_errors", "capacity", "theory", "constellation", "output"});

    JobConfig cfg;
    if (job && !root.contains("job")) root["job"] = std::string(to_string(*job));
    cfg.job = job_kind_from_string(take_required<std::string>(root, "job", "config"));
    if (job && *job != cfg.job)
        throw ConfigError("config job '" + std::string(to_string(cfg.job)) + "' does not match subcommand '" +
                          std::string(to_string(*job)) + "'");

    // link
    if (!root.contains("link")) throw ConfigError("missing field: config.link");
    auto& link = root["link"];
    reject_unknown(link, "link", {"N", "K", "kappa", "kappa_db", "B", "ra_spacing_over_lambda", "aoa_phi"});
    auto& L = cfg.sweep.link;
    L.N = to_int(take_required<std::int64_t>(link, "N", "link"), "link.N");
    L.K = to_int(take<std::int64_t>(link, "K", "link", 1), "link.K");
    if (link.contains("kappa") && link.contains("kappa_db"))
        throw ConfigError("link.kappa and link.kappa_db are exclusive");
    L.kappa = link.contains("kappa_db") ? db_to_linear(take<double>(link, "kappa_db", "link", 0.0))
                                        : take<double>(link, "kappa", "link", 1.0);
    L.B = to_int(take<std::int64_t>(link, "B", "link", 3), "link.B");
    L.ra_spacing_over_lambda = take<double>(link, "ra_spacing_over_lambda", "link", 0.5);
    L.aoa_phi = take<double>(link, "aoa_phi", "link", 0.0);
    L.validate();

    // scheme
    if (!root.contains("scheme")) throw ConfigError("missing field: config.scheme");
    auto& sch = root["scheme"];
    reject_unknown(sch, "scheme", {"kind", "M", "V"});
    auto& S = cfg.sweep.scheme;
    S.kind = scheme_kind_from_string(take_required<std::string>(sch, "kind", "scheme"));
    S.M = to_int(take_required<std::int64_t>(sch, "M", "scheme"), "scheme.M");
    S.V = to_int(take<std::int64_t>(sch, "V", "scheme", S.kind == SchemeKind::psk ? 1 : 4), "scheme.V");
    S.validate(L.N, L.B);

    // sweep
    if (!root.contains("snr_db")) root["snr_db"] = json::array();
    if (!root["snr_db"].is_array()) throw ConfigError("config.snr_db must be an array");
    for (const auto& v : root["snr_db"]) {
        if (!v.is_number()) throw ConfigError("config.snr_db entries must be numbers");
        cfg.sweep.snr_grid_db.push_back(v.get<double>());
    }
    cfg.sweep.trials_per_point = take<std::uint64_t>(root, "trials_per_point", "config", 10000);
    cfg.sweep.channels_per_point = static_cast<std::uint32_t>(
        take<std::uint64_t>(root, "channels_per_point", "config", 100));
    if (root["channels_per_point"].get<std::uint64_t>() > 0xffffffffu)
        throw ConfigError("config.channels_per_point out of range");
    if (seed) root["seed"] = *seed;
    cfg.sweep.master_seed = take<std::uint64_t>(root, "seed", "config", 1);
    cfg.sweep.early_stop = take<bool>(root, "early_stop", "config", false);
    cfg.sweep.early_stop_errors = take<std::uint64_t>(root, "early_stop_errors", "config", 100);

    // capacity
    auto& cap = section(root, "capacity");
    reject_unknown(cap, "capacity", {"monte_carlo", "gauss_hermite", "upper_bound", "quadrature_order"});
    cfg.capacity.monte_carlo = take<bool>(cap, "monte_carlo", "capacity", true);
    cfg.capacity.gauss_hermite = take<bool>(cap, "gauss_hermite", "capacity", true);
    cfg.capacity.upper_bound = take<bool>(cap, "upper_bound", "capacity", S.kind != SchemeKind::psk);
    cfg.capacity.quadrature_order =
        to_int(take<std::int64_t>(cap, "quadrature_order", "capacity", 16), "capacity.quadrature_order");
    if (cfg.capacity.upper_bound && S.kind == SchemeKind::psk)
        throw ConfigError("capacity.upper_bound is defined for APSK and QAPSK only");

    // theory
    auto& th = section(root, "theory");
    reject_unknown(th, "theory",
                   {"mode", "realizations", "apsk_geometry", "qapsk_scaling", "capacity_ub", "quadrature_order",
                    "craig_abs_tol", "craig_max_depth"});
    cfg.theory.mode = theory_mode_from_string(take<std::string>(th, "mode", "theory", "channel_average"));
    const auto reals = take<std::uint64_t>(th, "realizations", "theory", 100);
    if (reals > 0xffffffffu) throw ConfigError("theory.realizations out of range");
    cfg.theory.realizations = static_cast<std::uint32_t>(reals);
    cfg.theory.apsk_geometry = apsk_geometry_from_string(take<std::string>(th, "apsk_geometry", "theory", "listed"));
    cfg.theory.qapsk_scaling =
        qapsk_scaling_from_string(take<std::string>(th, "qapsk_scaling", "theory", "consistent"));
    cfg.theory.capacity_ub = take<bool>(th, "capacity_ub", "theory", true);
    cfg.theory.quadrature_order =
        to_int(take<std::int64_t>(th, "quadrature_order", "theory", 16), "theory.quadrature_order");
    cfg.theory.craig.abs_tol = take<double>(th, "craig_abs_tol", "theory", 1e-12);
    cfg.theory.craig.max_depth = to_int(take<std::int64_t>(th, "craig_max_depth", "theory", 40), "theory.craig_max_depth");
    if (!(cfg.theory.craig.abs_tol > 0.0)) throw ConfigError("theory.craig_abs_tol must be > 0");
    if (cfg.theory.craig.max_depth < 1 || cfg.theory.craig.max_depth > 60)
        throw ConfigError("theory.craig_max_depth must be in [1, 60]");

    // constellation
    auto& con = section(root, "constellation");
    reject_unknown(con, "constellation", {"mode", "channel_index"});
    const auto mode = take<std::string>(con, "mode", "constellation", "realization");
    if (mode == "realization") cfg.constellation_mode = ConstellationMode::realization;
    else if (mode == "mean") cfg.constellation_mode = ConstellationMode::mean;
    else throw ConfigError("unknown constellation.mode: " + mode);
    cfg.channel_index = take<std::uint64_t>(con, "channel_index", "constellation", 0);
    if (cfg.constellation_mode == ConstellationMode::mean && S.kind == SchemeKind::psk)
        throw ConfigError("constellation.mode 'mean' is not defined for PSK");

    if (root.contains("output")) cfg.output = take<std::string>(root, "output", "config", "");

    // Constraints that depend on the job kind.
    switch (cfg.job) {
    case JobKind::constellation: break;
    case JobKind::capacity:
    case JobKind::sep: cfg.sweep.validate(); break;
    case JobKind::theory:
        cfg.sweep.validate();
        if (S.kind == SchemeKind::psk) throw ConfigError("theory jobs cover APSK and QAPSK only");
        if (S.V < 4) throw ConfigError("SEP theory requires V >= 4: V=" + std::to_string(S.V));
        if (cfg.theory.mode != TheoryMode::mean_gain && cfg.theory.realizations < 1)
            throw ConfigError("theory.realizations must be >= 1");
        break;
    }
    if (cfg.capacity.quadrature_order < 1 || cfg.capacity.quadrature_order > 200)
        throw ConfigError("capacity.quadrature_order must be in [1, 200]");
    if (cfg.theory.quadrature_order < 1 || cfg.theory.quadrature_order > 200)
        throw ConfigError("theory.quadrature_order must be in [1, 200]");

    cfg.resolved = root.dump();
    return cfg;
}

} // namespace rismod
