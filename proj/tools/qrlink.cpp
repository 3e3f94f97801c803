// Command-line front end: platform tables, distance sweeps, cutoff
// optimization and Monte Carlo validation of the analytic rates.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qrlink/csv.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qrlink;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct CommonOptions {
    std::string era_text = "current";
    std::string config_path;
    double l_att_km = 22.0;
    double signal_speed = 200.0;
    int threads = 0;
    std::string timestamp = "-";
    bool latt_set = false;
    bool speed_set = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("--era", options.era_text, "Parameter era: current|future")
        ->check(CLI::IsMember({"current", "future"}));
    cmd->add_option("--config", options.config_path, "Platform config file replacing the built-ins");
    cmd->add_option("--latt", options.l_att_km, "Fiber attenuation length in km")
        ->each([&](const std::string&) { options.latt_set = true; });
    cmd->add_option("--signal-speed", options.signal_speed, "Signal speed in km/ms")
        ->each([&](const std::string&) { options.speed_set = true; });
    cmd->add_option("--threads", options.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--timestamp", options.timestamp,
                    "Timestamp recorded in output manifests (default '-' keeps outputs reproducible)");
}

struct ResolvedSetup {
    std::vector<PlatformParams> platforms;
    ChannelParams channel;
    Era era = Era::current;
    std::string era_label;  // provenance label used in output paths
};

ResolvedSetup resolve_setup(const CommonOptions& options) {
    ResolvedSetup setup;
    setup.era = *parse_era(options.era_text);
    if (options.config_path.empty()) {
        setup.platforms = builtin_platforms(setup.era);
        setup.era_label = std::string(era_name(setup.era));
    } else {
        std::ifstream file(options.config_path);
        if (!file) throw std::runtime_error("cannot open config file: " + options.config_path);
        std::stringstream text;
        text << file.rdbuf();
        PlatformConfig config = parse_config(text.str(), setup.era);
        setup.platforms = std::move(config.platforms);
        setup.channel = config.channel;
        setup.era_label = "custom";
    }
    if (options.latt_set) setup.channel.l_att_km = options.l_att_km;
    if (options.speed_set) setup.channel.signal_speed_km_per_ms = options.signal_speed;
    setup.channel.validate();
    return setup;
}

std::vector<PlatformParams> select_platforms(const ResolvedSetup& setup,
                                             const std::vector<std::string>& requested) {
    if (requested.empty()) return setup.platforms;
    std::vector<PlatformParams> selected;
    for (const std::string& name : requested) {
        bool found = false;
        for (const PlatformParams& platform : setup.platforms) {
            if (platform.name == name) {
                selected.push_back(platform);
                found = true;
                break;
            }
        }
        if (!found) throw std::runtime_error("unknown platform: " + name);
    }
    return selected;
}

std::optional<CutoffPolicy> parse_cutoff_policy(const std::string& text) {
    if (text == "fixed") return CutoffPolicy{FixedOverRangePolicy{}};
    if (text == "optimal") return CutoffPolicy{PerDistanceOptimalPolicy{}};
    if (text == "unbounded" || text == "inf") return CutoffPolicy{Cutoff::unbounded()};
    try {
        std::size_t consumed = 0;
        const long long value = std::stoll(text, &consumed);
        if (consumed == text.size() && value >= 0) return CutoffPolicy{Cutoff::finite(value)};
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

std::optional<Cutoff> parse_cutoff_value(const std::string& text) {
    const auto policy = parse_cutoff_policy(text);
    if (!policy) return std::nullopt;
    if (const Cutoff* pinned = std::get_if<Cutoff>(&*policy)) return *pinned;
    return std::nullopt;
}

std::vector<double> make_grid(double l_min, double l_max, double l_step) {
    if (!(l_step > 0.0) || !(l_max >= l_min) || !(l_min >= 0.0))
        throw std::runtime_error("invalid distance grid: require 0 <= lmin <= lmax and lstep > 0");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double distance = l_min + static_cast<double>(i) * l_step;
        if (distance > l_max + 1e-9) break;
        grid.push_back(std::min(distance, l_max));
    }
    return grid;
}

RunManifest make_manifest(std::string command, std::vector<std::string> parameters,
                          const CommonOptions& options, std::string seed = "-") {
    RunManifest manifest;
    manifest.command = std::move(command);
    manifest.parameters = std::move(parameters);
    manifest.seed = std::move(seed);
    manifest.timestamp = options.timestamp;
    return manifest;
}

int run_platforms(const CommonOptions& options) {
    const ResolvedSetup setup = resolve_setup(options);
    std::printf("%-16s %8s %12s %12s\n", "platform", "p_link", "clock_mhz", "tcoh_ms");
    for (const PlatformParams& platform : setup.platforms) {
        std::printf("%-16s %8s %12s %12s\n", platform.name.c_str(),
                    format_number(platform.p_link).c_str(),
                    format_number(platform.clock_mhz).c_str(),
                    format_number(platform.tau_coh_ms).c_str());
    }
    std::printf("# era=%s l_att_km=%s signal_speed_km_per_ms=%s\n", setup.era_label.c_str(),
                format_number(setup.channel.l_att_km).c_str(),
                format_number(setup.channel.signal_speed_km_per_ms).c_str());
    return kExitOk;
}

struct SweepOptions {
    std::string protocol_text = "nsp-cell";
    std::vector<std::string> platforms;
    std::string mode = "skr";
    std::string cutoff_text = "fixed";
    double f_min = 0.95;
    double p_bm = 1.0;
    double l_min = 0.0;
    double l_max = 400.0;
    double l_step = 2.0;
    std::string out_dir = "out";
};

int run_sweep(const CommonOptions& common, const SweepOptions& options,
              const std::string& command_line) {
    const ResolvedSetup setup = resolve_setup(common);
    const auto kind = parse_protocol(options.protocol_text);
    if (!kind) throw std::runtime_error("unknown protocol: " + options.protocol_text);
    const auto policy = parse_cutoff_policy(options.cutoff_text);
    if (!policy) throw std::runtime_error("invalid --cutoff value: " + options.cutoff_text);

    const std::vector<PlatformParams> platforms = select_platforms(setup, options.platforms);
    const std::vector<double> grid = make_grid(options.l_min, options.l_max, options.l_step);
    const ProtocolSpec protocol{*kind, options.p_bm};

    std::vector<SweepResult> sweeps;
    for (const PlatformParams& platform : platforms) {
        if (options.mode == "skr")
            sweeps.push_back(sweep_skr(platform, protocol, setup.channel, grid, *policy,
                                       common.threads));
        else
            sweeps.push_back(sweep_rr(platform, protocol, setup.channel, grid, options.f_min,
                                      common.threads));
    }

    const fs::path directory =
        fs::path(options.out_dir) / setup.era_label / std::string(protocol_name(*kind));
    fs::create_directories(directory);

    std::vector<std::string> parameters = {
        "era=" + setup.era_label,
        "protocol=" + std::string(protocol_name(*kind)),
        "mode=" + options.mode,
        "cutoff=" + options.cutoff_text,
        "fmin=" + format_number(options.f_min),
        "p_bm=" + format_number(options.p_bm),
        "grid_km=" + format_number(options.l_min) + ":" + format_number(options.l_max) + ":" +
            format_number(options.l_step),
        "l_att_km=" + format_number(setup.channel.l_att_km),
        "signal_speed_km_per_ms=" + format_number(setup.channel.signal_speed_km_per_ms),
    };
    const RunManifest manifest = make_manifest(command_line, parameters, common);

    for (const SweepResult& sweep : sweeps) {
        const fs::path file = directory / (sweep.platform + ".csv");
        std::ofstream out(file);
        if (!out) throw std::runtime_error("cannot write " + file.string());
        write_sweep_csv(out, sweep, manifest);
        std::cout << "wrote " << file.string();
        if (sweep.regime.ideal_crossing_km)
            std::cout << "  (enters ideal repeater regime at "
                      << format_number(*sweep.regime.ideal_crossing_km) << " km)";
        std::cout << "\n";
    }
    const fs::path combined = directory / "combined.csv";
    std::ofstream out(combined);
    if (!out) throw std::runtime_error("cannot write " + combined.string());
    write_combined_csv(out, sweeps, manifest);
    std::cout << "wrote " << combined.string() << "\n";
    return kExitOk;
}

int run_optimize(const CommonOptions& common, const SweepOptions& options) {
    const ResolvedSetup setup = resolve_setup(common);
    const auto kind = parse_protocol(options.protocol_text);
    if (!kind) throw std::runtime_error("unknown protocol: " + options.protocol_text);
    const std::vector<PlatformParams> platforms = select_platforms(setup, options.platforms);
    const std::vector<double> grid = make_grid(options.l_min, options.l_max, options.l_step);
    const ProtocolSpec protocol{*kind, options.p_bm};

    for (const PlatformParams& platform : platforms) {
        std::vector<LinkContext> contexts;
        contexts.reserve(grid.size());
        for (double distance : grid)
            contexts.push_back(resolve_context(platform, protocol, setup.channel, distance));
        const RangeCutoffResult range =
            fixed_cutoff_over_range(contexts, kDefaultCutoffSearchCap, common.threads);
        std::cout << "platform=" << platform.name << " protocol=" << protocol_name(*kind)
                  << " fixed_cutoff=" << format_cutoff(*range.fixed.m)
                  << " worst_case_ratio=" << format_number(range.fixed.achieved_value) << "\n";
        std::cout << "distance_km,optimal_cutoff,skr_per_use_per_mode\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const CutoffChoice& choice = range.per_distance[i];
            std::cout << format_number(grid[i]) << ',' << format_cutoff(*choice.m) << ','
                      << format_number(choice.achieved_value) << "\n";
        }
    }
    return kExitOk;
}

struct SimulateOptions {
    double p = 0.5;
    std::string cutoff_text = "unbounded";
    double t0_ms = 1.0;
    double tau_coh_ms = 100.0;
    int extra_units = 0;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t budget = 1'000'000'000;
};

int run_simulate(const CommonOptions& common, const SimulateOptions& options) {
    const auto cutoff = parse_cutoff_value(options.cutoff_text);
    if (!cutoff) throw std::runtime_error("invalid --cutoff value: " + options.cutoff_text);
    McConfig config{options.trials, options.seed, options.budget, common.threads};
    const McEstimate estimate = simulate_cell(options.p, *cutoff, options.t0_ms,
                                              options.tau_coh_ms, options.extra_units, config);
    std::cout << "trials=" << estimate.trials << " seed=" << estimate.seed << "\n";
    std::cout << "raw_rate=" << format_number(estimate.raw_rate_hat) << " +- "
              << format_number(estimate.raw_rate_se) << "\n";
    std::cout << "expectation=" << format_number(estimate.expectation_hat) << " +- "
              << format_number(estimate.expectation_se) << "\n";
    std::cout << "fidelity=" << format_number(estimate.fidelity_hat) << " +- "
              << format_number(estimate.fidelity_se) << "\n";
    std::cout << "mean_attempts=" << format_number(estimate.mean_attempts_hat) << " +- "
              << format_number(estimate.mean_attempts_se) << "\n";
    return kExitOk;
}

struct ValidateOptions {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 42;
    std::uint64_t budget = 1'000'000'000;
    int extra_units = 2;
    double z_threshold = 4.0;
};

int run_validate(const CommonOptions& common, const ValidateOptions& options,
                 const std::string& command_line) {
    const std::vector<McGridPoint> grid = default_validation_grid();
    McConfig config{options.trials, options.seed, options.budget, common.threads};
    const McComparisonReport report =
        compare_with_analytic(grid, options.extra_units, config, options.z_threshold);
    const RunManifest manifest = make_manifest(
        command_line,
        {"trials=" + std::to_string(options.trials), "extra_units=" + std::to_string(options.extra_units),
         "z_threshold=" + format_number(options.z_threshold)},
        common, std::to_string(options.seed));
    write_validation_report(std::cout, report, manifest);
    return report.all_pass ? kExitOk : kExitFailure;
}

std::string join_arguments(int argc, char** argv) {
    std::string joined;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) joined += ' ';
        joined += argv[i];
    }
    return joined;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rates, cutoffs and benchmark bounds for elementary memory-based "
                 "quantum-repeater links"};
    app.require_subcommand(1);

    CommonOptions common;
    SweepOptions sweep_options;
    SimulateOptions simulate_options;
    ValidateOptions validate_options;

    CLI::App* platforms_cmd = app.add_subcommand("platforms", "List platform parameter sets");
    add_common_flags(platforms_cmd, common);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Rate-vs-distance sweep to CSV files");
    add_common_flags(sweep_cmd, common);
    sweep_cmd->add_option("--protocol", sweep_options.protocol_text,
                          "nsp-cell|nsp-two-segment|nrp-cell|nrp-cell-bm");
    sweep_cmd->add_option("--platform", sweep_options.platforms, "Platform name (repeatable)");
    sweep_cmd->add_option("--mode", sweep_options.mode, "skr|rr")
        ->check(CLI::IsMember({"skr", "rr"}));
    sweep_cmd->add_option("--cutoff", sweep_options.cutoff_text,
                          "Cutoff policy: fixed|optimal|INT|unbounded");
    sweep_cmd->add_option("--fmin", sweep_options.f_min, "Fidelity floor for RR sweeps");
    sweep_cmd->add_option("--pbm", sweep_options.p_bm, "Final memory BM efficiency");
    sweep_cmd->add_option("--lmin", sweep_options.l_min, "Grid start in km");
    sweep_cmd->add_option("--lmax", sweep_options.l_max, "Grid end in km");
    sweep_cmd->add_option("--lstep", sweep_options.l_step, "Grid step in km");
    sweep_cmd->add_option("--out", sweep_options.out_dir, "Output directory");

    CLI::App* optimize_cmd =
        app.add_subcommand("optimize", "Per-distance and fixed-over-range optimal cutoffs");
    add_common_flags(optimize_cmd, common);
    optimize_cmd->add_option("--protocol", sweep_options.protocol_text,
                             "nsp-cell|nsp-two-segment|nrp-cell|nrp-cell-bm");
    optimize_cmd->add_option("--platform", sweep_options.platforms, "Platform name (repeatable)");
    optimize_cmd->add_option("--pbm", sweep_options.p_bm, "Final memory BM efficiency");
    optimize_cmd->add_option("--lmin", sweep_options.l_min, "Grid start in km");
    optimize_cmd->add_option("--lmax", sweep_options.l_max, "Grid end in km");
    optimize_cmd->add_option("--lstep", sweep_options.l_step, "Grid step in km");

    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo run of the cutoff-restart protocol");
    add_common_flags(simulate_cmd, common);
    simulate_cmd->add_option("--p", simulate_options.p, "Half-link success probability");
    simulate_cmd->add_option("--cutoff", simulate_options.cutoff_text, "INT or unbounded");
    simulate_cmd->add_option("--t0-ms", simulate_options.t0_ms, "Attempt duration in ms");
    simulate_cmd->add_option("--tcoh-ms", simulate_options.tau_coh_ms, "Coherence time in ms");
    simulate_cmd->add_option("--extra", simulate_options.extra_units, "Extra dephasing units");
    simulate_cmd->add_option("--trials", simulate_options.trials, "Trial count");
    simulate_cmd->add_option("--seed", simulate_options.seed, "RNG seed");
    simulate_cmd->add_option("--budget", simulate_options.budget, "Expected-step budget");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Compare analytic rates against the Monte Carlo oracle");
    add_common_flags(validate_cmd, common);
    validate_cmd->add_option("--trials", validate_options.trials, "Trials per grid point");
    validate_cmd->add_option("--seed", validate_options.seed, "RNG seed");
    validate_cmd->add_option("--budget", validate_options.budget, "Expected-step budget");
    validate_cmd->add_option("--extra", validate_options.extra_units, "Extra dephasing units");
    validate_cmd->add_option("--zmax", validate_options.z_threshold, "z-score pass threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::string command_line = join_arguments(argc, argv);
    try {
        if (platforms_cmd->parsed()) return run_platforms(common);
        if (sweep_cmd->parsed()) return run_sweep(common, sweep_options, command_line);
        if (optimize_cmd->parsed()) return run_optimize(common, sweep_options);
        if (simulate_cmd->parsed()) return run_simulate(common, simulate_options);
        if (validate_cmd->parsed()) return run_validate(common, validate_options, command_line);
    } catch (const BudgetExceeded& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
