// rismod: run constellation, capacity, SEP and theory jobs from a JSON config.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rismod/analysis.hpp"
#include "rismod/csv.hpp"
#include "rismod/errors.hpp"
#include "rismod/job_config.hpp"
#include "rismod/montecarlo.hpp"

namespace {

using namespace rismod;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string run_job(const JobConfig& cfg) {
    const std::vector<std::string> header = {
        "rismod " + std::string(to_string(cfg.job)),
        "seed " + std::to_string(cfg.sweep.master_seed),
        "config " + cfg.resolved,
    };
    std::ostringstream out;
    switch (cfg.job) {
    case JobKind::constellation: {
        const auto& link = cfg.sweep.link;
        const auto& scheme = cfg.sweep.scheme;
        if (cfg.constellation_mode == ConstellationMode::mean) {
            const double kp = equivalent_link(link).kappa_prime;
            write_constellation_csv(out, mean_constellation(scheme, link.N, link.B, kp), header);
        } else {
            const auto g = draw_equivalent_gains(link, cfg.sweep.master_seed, cfg.channel_index);
            const auto part = partition_blocks(link.N, scheme);
            write_constellation_csv(out, received_signal_set(g, scheme, part, link.B), header);
        }
        break;
    }
    case JobKind::capacity:
        write_sweep_csv(out, simulate_capacity(cfg.sweep, cfg.capacity),
                        {Metric::capacity_sim, Metric::capacity_gh, Metric::capacity_ub}, header);
        break;
    case JobKind::sep:
        write_sweep_csv(out, simulate_sep(cfg.sweep), {Metric::sep_sim}, header);
        break;
    case JobKind::theory:
        write_sweep_csv(out, theory_sweep(cfg.sweep, cfg.theory), {Metric::sep_theory, Metric::capacity_ub},
                        header);
        break;
    }
    return out.str();
}

int run(JobKind kind, const std::string& config_path, const std::string& out_path,
        std::optional<std::uint64_t> seed, std::optional<int> workers) {
    try {
        auto cfg = parse_job_config(read_file(config_path), seed, kind);
        if (workers) {
            if (*workers < 1) throw ConfigError("--workers must be >= 1");
            cfg.sweep.workers = *workers;
        }
        const std::string target = !out_path.empty() ? out_path : cfg.output.value_or("");
        const auto text = run_job(cfg);
        if (target.empty() || target == "-") {
            std::cout << text;
        } else {
            std::ofstream f(target, std::ios::binary);
            if (!f) throw ConfigError("cannot open output file: " + target);
            f << text;
            if (!f.flush()) throw ConfigError("cannot write output file: " + target);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS modulation sweeps: constellations, capacity, SEP and theory curves"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<JobKind> chosen;

    for (const auto kind : {JobKind::constellation, JobKind::capacity, JobKind::sep, JobKind::theory}) {
        auto* sub = app.add_subcommand(std::string(to_string(kind)), "run a " + std::string(to_string(kind)) + " job");
        sub->add_option("--config", config_path, "JSON job file")->required();
        sub->add_option("--out", out_path, "output CSV (default: config 'output', else stdout)");
        sub->add_option("--seed", seed, "master seed, overrides the config");
        sub->add_option("--workers", workers, "worker threads (default: available cores)");
        sub->callback([kind, &chosen] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    return run(*chosen, config_path, out_path, seed, workers);
}
