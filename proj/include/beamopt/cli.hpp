#ifndef BEAMOPT_CLI_HPP
#define BEAMOPT_CLI_HPP

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "beamopt/bench.hpp"
#include "beamopt/synth.hpp"

namespace beamopt::cli {

// Exit codes, also listed in --help: 0 success, 1 validation failure
// (validate only), 2 usage, 3 IO/dataset, 4 algorithm failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidDataset = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitAlgorithm = 4;

/// Storage for every flag of every subcommand; filled by build_app().
struct CliState {
    // global
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = ".";
    std::string format = "json";

    // dataset source (align/bench/sweep/curves)
    std::string dataset_path;
    int synth_locations = 0;

    // algorithm knobs
    std::string algo = "rbo";
    std::string algos = "rbo";
    int n_init = 15;
    int t_iters = 50;
    double xi = 0.05;
    double ei_stop = 1e-8;
    double refine_tx_deg = 10.0;
    double refine_rx_deg = 10.0;
    bool no_refine = false;
    int restarts = 3;
    int refit_every = 1;
    int budget = 80;
    int sparsity_k = 8;
    std::string dictionary = "dft2d";

    // align
    std::string location;
    std::string trace_out;

    // bench
    int seed_count = 1;
    bool export_traces = false;

    // sweep
    std::string n_init_grid = "5,10,15,20";
    std::string t_grid = "10,25,50";

    // curves
    std::string budgets = "30,40,50,60,80,120,200";
    bool ablation = false;

    // synth
    int locations = 43;
    double dither_db = 0.5;
    double noise_floor_db = -40.0;
    int tx_antennas = 16;
    int rx_antennas = 16;

    // convert
    std::string raw_path;
    std::string format_spec_path;

    // validate
    std::string validate_path;
};

namespace detail_cli {

using beamopt::detail::format_fixed;

inline std::vector<int> parse_int_list(const std::string& csv, const char* what) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": cannot parse integer '" + item + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return out;
}

inline std::vector<std::string> parse_string_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Every run echoes its resolved parameters; the timestamp lives only here.
inline void write_run_config(const std::filesystem::path& out_dir, const std::string& command,
                             const nlohmann::ordered_json& resolved) {
    std::filesystem::create_directories(out_dir);
    nlohmann::ordered_json j;
    j["command"] = command;
    j["resolved"] = resolved;
    j["timestamp"] = timestamp_utc();
    std::ofstream out(out_dir / "run-config.json", std::ios::binary);
    if (!out) throw DatasetError("cannot write run-config.json in " + out_dir.string());
    out << j.dump(2) << '\n';
}

inline std::vector<PowerMap> resolve_dataset(const CliState& s) {
    if (!s.dataset_path.empty() && s.synth_locations > 0)
        throw std::invalid_argument("--dataset and --synth-locations are mutually exclusive");
    if (!s.dataset_path.empty()) return load_dataset(s.dataset_path);
    if (s.synth_locations > 0)
        return generate_campaign(s.synth_locations, BeamGrid::default_grid(), CampaignRanges{}, s.seed);
    throw std::invalid_argument("need a dataset: pass --dataset DIR or --synth-locations N");
}

inline AlgorithmSpec make_algorithm_spec(const CliState& s, Algo algo) {
    AlgorithmSpec a;
    a.algo = algo;
    a.rbo.n_init = s.n_init;
    a.rbo.t_iters = s.t_iters;
    a.rbo.acquisition.xi = s.xi;
    a.rbo.acquisition.ei_stop_threshold = s.ei_stop;
    a.rbo.refine_tx_deg = s.refine_tx_deg;
    a.rbo.refine_rx_deg = s.refine_rx_deg;
    a.rbo.refine_enabled = !s.no_refine;
    a.rbo.hyperopt_restarts = s.restarts;
    a.rbo.refit_every = s.refit_every;
    a.budget = s.budget;
    a.refine_enabled = !s.no_refine;
    a.refine_tx_deg = s.refine_tx_deg;
    a.refine_rx_deg = s.refine_rx_deg;
    a.romp.sparsity_k = s.sparsity_k;
    a.romp.dictionary = s.dictionary == "identity" ? Dictionary::Identity : Dictionary::Dft2d;
    return a;
}

inline nlohmann::ordered_json algorithm_flags_json(const CliState& s) {
    return nlohmann::ordered_json{{"n_init", s.n_init},
                                  {"t_iters", s.t_iters},
                                  {"xi", s.xi},
                                  {"ei_stop", s.ei_stop},
                                  {"refine_tx_deg", s.refine_tx_deg},
                                  {"refine_rx_deg", s.refine_rx_deg},
                                  {"refine_enabled", !s.no_refine},
                                  {"restarts", s.restarts},
                                  {"refit_every", s.refit_every},
                                  {"budget", s.budget},
                                  {"sparsity_k", s.sparsity_k},
                                  {"dictionary", s.dictionary}};
}

inline std::vector<std::uint64_t> seed_list(const CliState& s) {
    if (s.seed_count < 1) throw std::invalid_argument("--seeds must be >= 1");
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < s.seed_count; ++i) seeds.push_back(s.seed + static_cast<std::uint64_t>(i));
    return seeds;
}

}  // namespace detail_cli

inline std::unique_ptr<CLI::App> build_app(CliState& s) {
    auto app = std::make_unique<CLI::App>(
        "beamopt: Bayesian-optimization beam alignment over measured or synthetic "
        "AoD-AoA power maps.\n"
        "Exit codes: 0 success, 1 dataset invalid (validate), 2 usage, 3 IO/dataset, "
        "4 algorithm failure.");
    app->require_subcommand(1);
    app->fallthrough();  // global flags may follow the subcommand
    app->set_config("--config", "", "Read defaults from an INI/TOML file (flags take precedence)");

    app->add_option("--seed", s.seed, "Base RNG seed")->capture_default_str();
    app->add_option("--workers", s.workers, "Worker threads for experiment runners")
        ->capture_default_str();
    app->add_option("--out-dir", s.out_dir, "Directory for machine-readable outputs")
        ->capture_default_str();
    app->add_option("--format", s.format, "Report format: json (default) or csv adds report.csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    auto add_dataset_flags = [&](CLI::App* cmd) {
        cmd->add_option("--dataset", s.dataset_path, "Canonical dataset directory (or manifest.json)");
        cmd->add_option("--synth-locations", s.synth_locations,
                        "Generate a synthetic campaign with N locations instead of loading a dataset");
    };
    auto add_algo_flags = [&](CLI::App* cmd) {
        cmd->add_option("--n-init", s.n_init, "Random initialization probes (R-BO)")->capture_default_str();
        cmd->add_option("--t-iters", s.t_iters, "BO iterations (R-BO)")->capture_default_str();
        cmd->add_option("--xi", s.xi, "EI exploration constant")->capture_default_str();
        cmd->add_option("--ei-stop", s.ei_stop, "Early-stop threshold on max EI")->capture_default_str();
        cmd->add_option("--refine-tx-deg", s.refine_tx_deg, "Refinement half-width, TX axis (deg)")
            ->capture_default_str();
        cmd->add_option("--refine-rx-deg", s.refine_rx_deg, "Refinement half-width, RX axis (deg)")
            ->capture_default_str();
        cmd->add_flag("--no-refine", s.no_refine, "Disable the one-shot refinement stage");
        cmd->add_option("--restarts", s.restarts, "Hyperparameter-search random restarts")
            ->capture_default_str();
        cmd->add_option("--refit-every", s.refit_every,
                        "Re-optimize GP hyperparameters every this many BO iterations")
            ->capture_default_str();
        cmd->add_option("--budget", s.budget, "Total probe budget (random/romp)")->capture_default_str();
        cmd->add_option("--sparsity-k", s.sparsity_k, "ROMP sparsity level")->capture_default_str();
        cmd->add_option("--dictionary", s.dictionary, "ROMP dictionary")
            ->check(CLI::IsMember({"dft2d", "identity"}))
            ->capture_default_str();
    };

    auto* align = app->add_subcommand("align", "Align one location and print the selected beam pair");
    add_dataset_flags(align);
    add_algo_flags(align);
    align->add_option("--location", s.location, "Location id (default: first in the dataset)");
    align->add_option("--algo", s.algo, "Algorithm: rbo, random, romp, exhaustive")
        ->check(CLI::IsMember({"rbo", "random", "romp", "exhaustive"}))
        ->capture_default_str();
    align->add_option("--trace-out", s.trace_out, "Write the probe trace (JSON lines) to this file");

    auto* bench = app->add_subcommand(
        "bench", "Run (algorithm x location x seed) experiments and write report.json");
    add_dataset_flags(bench);
    add_algo_flags(bench);
    bench->add_option("--algos", s.algos, "Comma-separated algorithms")->capture_default_str();
    bench->add_option("--seeds", s.seed_count, "Number of seeds (base seed, base+1, ...)")
        ->capture_default_str();
    bench->add_flag("--traces", s.export_traces, "Also export per-run traces under <out-dir>/traces/");

    auto* sweep = app->add_subcommand(
        "sweep", "Accuracy over an (n_init, T) grid for R-BO; writes heatmap.csv");
    add_dataset_flags(sweep);
    add_algo_flags(sweep);
    sweep->add_option("--n-init-grid", s.n_init_grid, "Comma-separated n_init values")
        ->capture_default_str();
    sweep->add_option("--t-grid", s.t_grid, "Comma-separated T values")->capture_default_str();
    sweep->add_option("--seeds", s.seed_count, "Number of seeds")->capture_default_str();

    auto* curves = app->add_subcommand(
        "curves", "Mean penalty vs total probe budget per algorithm; writes curves.csv");
    add_dataset_flags(curves);
    add_algo_flags(curves);
    curves->add_option("--budgets", s.budgets, "Comma-separated total probe budgets")
        ->capture_default_str();
    curves->add_option("--algos", s.algos, "Comma-separated algorithms")->capture_default_str();
    curves->add_option("--seeds", s.seed_count, "Number of seeds")->capture_default_str();
    curves->add_flag("--ablation", s.ablation,
                     "Emit R-BO curves with and without refinement instead of --algos");

    auto* synth = app->add_subcommand(
        "synth", "Generate a synthetic beam-sweep campaign in the canonical dataset format");
    synth->add_option("--locations", s.locations, "Number of locations")->capture_default_str();
    synth->add_option("--dither-db", s.dither_db, "Uniform +- dB measurement dither")
        ->capture_default_str();
    synth->add_option("--noise-floor-db", s.noise_floor_db, "Floor relative to each map's peak (dB)")
        ->capture_default_str();
    synth->add_option("--tx-antennas", s.tx_antennas, "TX array size")->capture_default_str();
    synth->add_option("--rx-antennas", s.rx_antennas, "RX array size")->capture_default_str();

    auto* convert = app->add_subcommand(
        "convert", "Rewrite raw delimited beam-sweep files into the canonical dataset format");
    convert->add_option("--raw", s.raw_path, "Raw file or directory of files")->required();
    convert->add_option("--format-spec", s.format_spec_path,
                        "JSON file mapping raw columns to (location, tx_angle, rx_angle, power)")
        ->required();

    auto* validate = app->add_subcommand(
        "validate", "Check dataset integrity (cell completeness); exit 0 valid, 1 invalid");
    validate->add_option("--dataset", s.validate_path, "Canonical dataset directory")->required();

    return app;
}

namespace detail_cli {

inline int cmd_align(const CliState& s) {
    const auto maps = resolve_dataset(s);
    if (maps.empty()) throw DatasetError("dataset has no locations");
    const PowerMap* map = &maps.front();
    if (!s.location.empty()) {
        map = nullptr;
        for (const auto& m : maps)
            if (m.location_id() == s.location) map = &m;
        if (!map) throw DatasetError("location '" + s.location + "' not in dataset");
    }

    auto resolved = algorithm_flags_json(s);
    resolved["algo"] = s.algo;
    resolved["location"] = map->location_id();
    resolved["seed"] = s.seed;
    write_run_config(s.out_dir, "align", resolved);

    const auto spec = make_algorithm_spec(s, parse_algo(s.algo));
    const auto trace = run_algorithm(spec, *map, s.seed);
    const auto [opt_pair, opt_power] = true_optimum(*map);
    const auto [tx_deg, rx_deg] = map->grid().angle_of(trace.selected);

    std::cout << "location " << map->location_id() << "  grid " << map->grid().tx_count() << "x"
              << map->grid().rx_count() << " (" << map->grid().size() << " pairs)\n";
    std::cout << "algorithm " << s.algo << "  seed " << s.seed << "\n";
    std::cout << "selected beam pair: tx " << trace.selected.tx << " (" << format_fixed(tx_deg, 1)
              << " deg), rx " << trace.selected.rx << " (" << format_fixed(rx_deg, 1) << " deg)\n";
    std::cout << "measured power: " << format_fixed(trace.selected_power_db) << " dB\n";
    std::cout << "probes used: " << trace.probes_used << "\n";
    std::cout << "penalty vs exhaustive optimum: " << format_fixed(penalty_db(trace, *map))
              << " dB\n";
    std::cout << "exact match: " << (trace.selected == opt_pair ? "yes" : "no") << "\n";
    if (trace.stopped_early) std::cout << "stopped early (max EI below threshold)\n";
    if (trace.used_fallback) std::cout << "warning: degraded to fallback probing\n";

    if (!s.trace_out.empty()) {
        std::ofstream out(s.trace_out, std::ios::binary);
        if (!out) throw DatasetError("cannot write trace file " + s.trace_out);
        write_trace_jsonl(trace, map->grid(), out);
    }
    return kExitOk;
}

inline void print_aggregates(const MetricsReport& report) {
    std::cout << "algo        accuracy%   mean_penalty_dB  mean_probes  overhead_red%  runs\n";
    for (const auto& a : report.aggregates) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-10s %9.2f %16.4f %12.1f %14.2f %5d\n", a.algo.c_str(),
                      a.accuracy_pct, a.mean_penalty_db, a.mean_probes, a.overhead_reduction_pct,
                      a.runs);
        std::cout << line;
        if (a.failed_runs > 0) std::cout << "  (" << a.failed_runs << " failed runs excluded)\n";
    }
}

inline void write_report_csv(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot write " + path.string());
    out << '#' << kReportSchema << '\n';
    out << "algo,location,seed,exact_match,penalty_db,probes_used,selected_tx,selected_rx,failed\n";
    for (const auto& r : report.rows) {
        out << r.algo << ',' << r.location << ',' << r.seed << ',' << (r.exact_match ? 1 : 0) << ','
            << format_fixed(r.penalty_db) << ',' << r.probes_used << ',' << r.selected.tx << ','
            << r.selected.rx << ',' << (r.failed ? 1 : 0) << '\n';
    }
}

inline int cmd_bench(const CliState& s) {
    ExperimentSpec spec;
    spec.maps = resolve_dataset(s);
    spec.dataset_label = !s.dataset_path.empty()
                             ? s.dataset_path
                             : "synthetic campaign (" + std::to_string(s.synth_locations) + " locations)";
    for (const auto& name : parse_string_list(s.algos))
        spec.algorithms.push_back(make_algorithm_spec(s, parse_algo(name)));
    spec.seeds = seed_list(s);
    spec.workers = s.workers;
    if (s.export_traces) spec.trace_dir = (std::filesystem::path(s.out_dir) / "traces").string();

    auto resolved = algorithm_flags_json(s);
    resolved["algos"] = s.algos;
    resolved["seeds"] = spec.seeds;
    resolved["dataset"] = spec.dataset_label;
    resolved["workers"] = s.workers;
    write_run_config(s.out_dir, "bench", resolved);

    const auto report = run_experiment(spec);
    write_report_json(report, std::filesystem::path(s.out_dir) / "report.json");
    if (s.format == "csv") write_report_csv(report, std::filesystem::path(s.out_dir) / "report.csv");
    print_aggregates(report);
    return kExitOk;
}

inline int cmd_sweep(const CliState& s) {
    ExperimentSpec spec;
    spec.maps = resolve_dataset(s);
    spec.algorithms = {make_algorithm_spec(s, Algo::Rbo)};
    spec.seeds = seed_list(s);
    spec.workers = s.workers;
    for (int n : parse_int_list(s.n_init_grid, "--n-init-grid"))
        for (int t : parse_int_list(s.t_grid, "--t-grid")) spec.init_iter_grid.emplace_back(n, t);

    auto resolved = algorithm_flags_json(s);
    resolved["n_init_grid"] = s.n_init_grid;
    resolved["t_grid"] = s.t_grid;
    resolved["seeds"] = spec.seeds;
    resolved["workers"] = s.workers;
    write_run_config(s.out_dir, "sweep", resolved);

    const auto cells = sweep_init_iters(spec);
    write_heatmap_csv(cells, std::filesystem::path(s.out_dir) / "heatmap.csv");
    for (const auto& c : cells) {
        std::cout << "n_init=" << c.n_init << " T=" << c.t_iters
                  << "  accuracy=" << format_fixed(c.accuracy_pct, 2) << "%"
                  << "  mean_penalty=" << format_fixed(c.mean_penalty_db) << " dB"
                  << (c.is_best ? "  <- best" : "") << "\n";
    }
    return kExitOk;
}

inline int cmd_curves(const CliState& s) {
    ExperimentSpec spec;
    spec.maps = resolve_dataset(s);
    spec.seeds = seed_list(s);
    spec.workers = s.workers;
    spec.budget_grid = parse_int_list(s.budgets, "--budgets");

    auto resolved = algorithm_flags_json(s);
    resolved["budgets"] = s.budgets;
    resolved["algos"] = s.algos;
    resolved["ablation"] = s.ablation;
    resolved["seeds"] = spec.seeds;
    resolved["workers"] = s.workers;
    write_run_config(s.out_dir, "curves", resolved);

    std::vector<CurvePoint> points;
    if (s.ablation) {
        spec.algorithms = {make_algorithm_spec(s, Algo::Rbo)};
        auto [with, without] = refinement_ablation(spec);
        points = std::move(with);
        points.insert(points.end(), without.begin(), without.end());
    } else {
        for (const auto& name : parse_string_list(s.algos))
            spec.algorithms.push_back(make_algorithm_spec(s, parse_algo(name)));
        points = convergence_curves(spec);
    }
    write_curves_csv(points, std::filesystem::path(s.out_dir) / "curves.csv");
    for (const auto& p : points) {
        std::cout << p.algo << " budget=" << p.budget
                  << " mean_penalty=" << format_fixed(p.mean_penalty_db) << " dB (" << p.runs
                  << " runs)\n";
    }
    return kExitOk;
}

inline int cmd_synth(const CliState& s) {
    CampaignRanges ranges;
    ranges.dither_db = s.dither_db;
    ranges.noise_floor_db = s.noise_floor_db;
    ranges.tx_antennas = s.tx_antennas;
    ranges.rx_antennas = s.rx_antennas;
    const auto maps = generate_campaign(s.locations, BeamGrid::default_grid(), ranges, s.seed);
    save_dataset(maps, s.out_dir);

    write_run_config(s.out_dir, "synth",
                     nlohmann::ordered_json{{"locations", s.locations},
                                            {"seed", s.seed},
                                            {"dither_db", s.dither_db},
                                            {"noise_floor_db", s.noise_floor_db},
                                            {"tx_antennas", s.tx_antennas},
                                            {"rx_antennas", s.rx_antennas}});
    std::cout << "wrote " << maps.size() << " locations to " << s.out_dir << "\n";
    return kExitOk;
}

inline int cmd_convert(const CliState& s) {
    std::ifstream in(s.format_spec_path, std::ios::binary);
    if (!in) throw DatasetError("cannot open format spec " + s.format_spec_path);
    nlohmann::json spec_json;
    try {
        in >> spec_json;
    } catch (const std::exception& e) {
        throw DatasetError("cannot parse format spec: " + std::string(e.what()));
    }
    const FormatSpec fmt = FormatSpec::from_json(spec_json);

    std::vector<std::filesystem::path> files;
    const std::filesystem::path raw(s.raw_path);
    if (std::filesystem::is_directory(raw)) {
        for (const auto& e : std::filesystem::directory_iterator(raw))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
    } else if (std::filesystem::exists(raw)) {
        files.push_back(raw);
    } else {
        throw DatasetError("raw path does not exist: " + s.raw_path);
    }

    const auto maps = convert_dataset(files, fmt);
    save_dataset(maps, s.out_dir);
    write_run_config(s.out_dir, "convert",
                     nlohmann::ordered_json{{"raw", s.raw_path},
                                            {"format_spec", s.format_spec_path},
                                            {"locations", maps.size()}});
    std::cout << "converted " << maps.size() << " locations to " << s.out_dir << "\n";
    return kExitOk;
}

inline int cmd_validate(const CliState& s) {
    try {
        const auto maps = load_dataset(s.validate_path);
        std::cout << "dataset OK: " << maps.size() << " locations";
        if (!maps.empty())
            std::cout << ", grid " << maps.front().grid().tx_count() << "x"
                      << maps.front().grid().rx_count() << " (" << maps.front().grid().size()
                      << " cells per location)";
        std::cout << "\n";
        return kExitOk;
    } catch (const DatasetError& e) {
        std::cout << "dataset INVALID: " << e.what() << "\n";
        return kExitInvalidDataset;
    }
}

}  // namespace detail_cli

/// Parses and executes one invocation. `args` excludes the program name.
inline int run(std::vector<std::string> args) {
    CliState s;
    s.workers = std::max(1u, std::thread::hardware_concurrency());
    auto app = build_app(s);

    try {
        // CLI11 consumes arguments in reverse order.
        std::reverse(args.begin(), args.end());
        app->parse(args);
    } catch (const CLI::CallForHelp&) {
        const auto parsed = app->get_subcommands();
        std::cout << (parsed.empty() ? app->help() : parsed.front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app->help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (app->got_subcommand("align")) return detail_cli::cmd_align(s);
        if (app->got_subcommand("bench")) return detail_cli::cmd_bench(s);
        if (app->got_subcommand("sweep")) return detail_cli::cmd_sweep(s);
        if (app->got_subcommand("curves")) return detail_cli::cmd_curves(s);
        if (app->got_subcommand("synth")) return detail_cli::cmd_synth(s);
        if (app->got_subcommand("convert")) return detail_cli::cmd_convert(s);
        if (app->got_subcommand("validate")) return detail_cli::cmd_validate(s);
        std::cerr << "usage error: no subcommand\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DatasetError& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "algorithm error: " << e.what() << "\n";
        return kExitAlgorithm;
    }
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

}  // namespace beamopt::cli

#endif  // BEAMOPT_CLI_HPP
