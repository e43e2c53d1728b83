#ifndef BEAMOPT_BENCH_HPP
#define BEAMOPT_BENCH_HPP

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "beamopt/align.hpp"
#include "beamopt/baselines.hpp"
#include "beamopt/domain.hpp"

namespace beamopt {

enum class Algo { Rbo, Random, Romp, Exhaustive };

inline const char* algo_name(Algo a) {
    switch (a) {
        case Algo::Rbo: return "rbo";
        case Algo::Random: return "random";
        case Algo::Romp: return "romp";
        case Algo::Exhaustive: return "exhaustive";
    }
    return "?";
}

inline Algo parse_algo(const std::string& name) {
    if (name == "rbo") return Algo::Rbo;
    if (name == "random") return Algo::Random;
    if (name == "romp") return Algo::Romp;
    if (name == "exhaustive") return Algo::Exhaustive;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

/// One algorithm entry of an experiment. The per-run seed always comes from
/// the experiment seed list; `budget`/`refine_enabled` drive the random and
/// ROMP baselines (R-BO carries its own knobs in `rbo`).
struct AlgorithmSpec {
    Algo algo = Algo::Rbo;
    RboConfig rbo{};
    RompConfig romp{};
    int budget = 80;
    bool refine_enabled = true;
    double refine_tx_deg = 10.0;
    double refine_rx_deg = 10.0;
};

inline AlignmentTrace run_algorithm(const AlgorithmSpec& a, const PowerMap& map,
                                    std::uint64_t seed) {
    MapOracle oracle(map);
    switch (a.algo) {
        case Algo::Rbo: {
            RboConfig cfg = a.rbo;
            cfg.seed = seed;
            return run_rbo(oracle, cfg);
        }
        case Algo::Random:
            return random_probing(oracle, a.budget, a.refine_enabled, seed, a.refine_tx_deg,
                                  a.refine_rx_deg);
        case Algo::Romp: {
            RompConfig cfg = a.romp;
            cfg.budget = a.budget;
            cfg.refine_enabled = a.refine_enabled;
            cfg.refine_tx_deg = a.refine_tx_deg;
            cfg.refine_rx_deg = a.refine_rx_deg;
            cfg.seed = seed;
            return romp_align(oracle, cfg);
        }
        case Algo::Exhaustive:
            return exhaustive_sweep(oracle);
    }
    throw std::logic_error("unreachable");
}

struct ExperimentSpec {
    std::vector<PowerMap> maps;
    std::string dataset_label = "dataset";
    std::vector<AlgorithmSpec> algorithms;
    std::vector<std::uint64_t> seeds;
    std::vector<int> budget_grid;                    // convergence_curves
    std::vector<std::pair<int, int>> init_iter_grid; // sweep_init_iters
    int workers = 1;
    std::string trace_dir;  // empty: no per-run trace export

    void validate() const {
        if (maps.empty()) throw std::invalid_argument("experiment needs at least one location");
        if (algorithms.empty()) throw std::invalid_argument("experiment needs at least one algorithm");
        if (seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
    }
};

struct MetricsRow {
    std::string algo;
    std::string location;
    std::uint64_t seed = 0;
    bool exact_match = false;
    double penalty_db = 0.0;
    int probes_used = 0;
    BeamPair selected{};
    bool stopped_early = false;
    bool used_fallback = false;
    bool failed = false;
    std::string error;
};

struct AlgoAggregate {
    std::string algo;
    double accuracy_pct = 0.0;
    double mean_penalty_db = 0.0;
    double std_penalty_db = 0.0;
    double mean_probes = 0.0;
    double overhead_reduction_pct = 0.0;
    int runs = 0;
    int failed_runs = 0;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
    std::vector<AlgoAggregate> aggregates;
    int grid_size = 0;
    std::string dataset_label;
    std::vector<std::uint64_t> seeds;
};

namespace detail {

/// Runs fn(0..jobs-1) over `workers` threads; results must be written to
/// preallocated, per-index slots so report ordering stays canonical.
inline void parallel_for(int jobs, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, jobs));
    if (workers == 1) {
        for (int i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= jobs) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Recomputes per-algorithm aggregates from rows; also serves as the
/// consistency checker for reports (aggregates carry no hidden state).
inline std::vector<AlgoAggregate> aggregates_from_rows(const std::vector<MetricsRow>& rows,
                                                       const std::vector<std::string>& algo_order,
                                                       int grid_size) {
    std::vector<AlgoAggregate> out;
    for (const auto& name : algo_order) {
        AlgoAggregate agg;
        agg.algo = name;
        double sum_pen = 0.0, sum_pen2 = 0.0, sum_probes = 0.0;
        int exact = 0;
        for (const auto& r : rows) {
            if (r.algo != name) continue;
            if (r.failed) {
                ++agg.failed_runs;
                continue;
            }
            ++agg.runs;
            exact += r.exact_match ? 1 : 0;
            sum_pen += r.penalty_db;
            sum_pen2 += r.penalty_db * r.penalty_db;
            sum_probes += r.probes_used;
        }
        if (agg.runs > 0) {
            agg.accuracy_pct = 100.0 * exact / agg.runs;
            agg.mean_penalty_db = sum_pen / agg.runs;
            const double var = sum_pen2 / agg.runs - agg.mean_penalty_db * agg.mean_penalty_db;
            agg.std_penalty_db = std::sqrt(std::max(var, 0.0));
            agg.mean_probes = sum_probes / agg.runs;
            agg.overhead_reduction_pct = 100.0 * (1.0 - agg.mean_probes / grid_size);
        }
        out.push_back(agg);
    }
    return out;
}

/// Runs every (algorithm, location, seed) combination and aggregates the
/// three headline metrics. Failed runs are flagged, reported, and excluded
/// from aggregates. Deterministic: job results land in canonical order no
/// matter the worker count.
inline MetricsReport run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const int n_algos = static_cast<int>(spec.algorithms.size());
    const int n_maps = static_cast<int>(spec.maps.size());
    const int n_seeds = static_cast<int>(spec.seeds.size());
    const int jobs = n_algos * n_maps * n_seeds;

    // Exhaustive truths, computed once per location.
    std::vector<std::pair<BeamPair, double>> truths;
    truths.reserve(spec.maps.size());
    for (const auto& m : spec.maps) truths.push_back(true_optimum(m));

    if (!spec.trace_dir.empty()) std::filesystem::create_directories(spec.trace_dir);

    MetricsReport report;
    report.grid_size = spec.maps.front().grid().size();
    report.dataset_label = spec.dataset_label;
    report.seeds = spec.seeds;
    report.rows.resize(static_cast<std::size_t>(jobs));

    detail::parallel_for(jobs, spec.workers, [&](int job) {
        const int a = job / (n_maps * n_seeds);
        const int m = (job / n_seeds) % n_maps;
        const int s = job % n_seeds;
        const auto& alg = spec.algorithms[static_cast<std::size_t>(a)];
        const auto& map = spec.maps[static_cast<std::size_t>(m)];
        const auto seed = spec.seeds[static_cast<std::size_t>(s)];

        MetricsRow row;
        row.algo = algo_name(alg.algo);
        row.location = map.location_id();
        row.seed = seed;
        try {
            const AlignmentTrace trace = run_algorithm(alg, map, seed);
            row.exact_match = trace.selected == truths[static_cast<std::size_t>(m)].first;
            row.penalty_db = penalty_db(trace, map);
            row.probes_used = trace.probes_used;
            row.selected = trace.selected;
            row.stopped_early = trace.stopped_early;
            row.used_fallback = trace.used_fallback;
            if (!spec.trace_dir.empty()) {
                const auto path = std::filesystem::path(spec.trace_dir) /
                                  (row.algo + "_" + row.location + "_" + std::to_string(seed) + ".jsonl");
                std::ofstream out(path, std::ios::binary);
                write_trace_jsonl(trace, map.grid(), out);
            }
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        report.rows[static_cast<std::size_t>(job)] = std::move(row);
    });

    std::vector<std::string> order;
    for (const auto& a : spec.algorithms) order.emplace_back(algo_name(a.algo));
    report.aggregates = aggregates_from_rows(report.rows, order, report.grid_size);
    return report;
}

// ---------------------------------------------------------------------------
// Convergence curves and the (n_init, T) sweep.
// ---------------------------------------------------------------------------

struct CurvePoint {
    std::string algo;
    int budget = 0;
    double mean_penalty_db = 0.0;
    double std_penalty_db = 0.0;
    int runs = 0;
};

/// Rewrites `a` so that one full run consumes `budget` probes in total
/// (refinement included). Returns false when the budget cannot fit.
inline bool apply_budget(AlgorithmSpec& a, int budget, const BeamGrid& grid) {
    switch (a.algo) {
        case Algo::Rbo: {
            const int refine_cost = a.rbo.refine_enabled
                                        ? nominal_refinement_cost(grid, a.rbo.refine_tx_deg, a.rbo.refine_rx_deg)
                                        : 0;
            const int t = budget - a.rbo.n_init - refine_cost;
            if (t < 0) return false;
            a.rbo.t_iters = t;
            return true;
        }
        case Algo::Random: {
            const int refine_cost =
                a.refine_enabled ? nominal_refinement_cost(grid, a.refine_tx_deg, a.refine_rx_deg) : 0;
            if (budget < refine_cost + 1) return false;
            a.budget = budget;
            return true;
        }
        case Algo::Romp: {
            const int refine_cost =
                a.refine_enabled ? nominal_refinement_cost(grid, a.refine_tx_deg, a.refine_rx_deg) : 0;
            if (budget < refine_cost + a.romp.sparsity_k) return false;
            a.budget = budget;
            return true;
        }
        case Algo::Exhaustive:
            return budget == grid.size();
    }
    return false;
}

/// Best-so-far penalty after each probe of a single trace; exact and
/// nonincreasing by construction.
inline std::vector<double> best_so_far_penalties(const AlignmentTrace& trace,
                                                 const PowerMap& truth) {
    const double opt = true_optimum(truth).second;
    std::vector<double> out;
    out.reserve(trace.records.size());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : trace.records) {
        best = std::max(best, r.power_db);
        out.push_back(opt - best);
    }
    return out;
}

/// Penalty of the best-measured-so-far selection after n probes, per budget
/// grid point, averaged over locations and seeds. One run per (algorithm,
/// location, seed) at the largest budget; each run's series is read off its
/// trace prefixes, with refinement probes counted at the tail. Runs that stop
/// early extend flat (their selection is final). Per run the series is
/// exactly nonincreasing.
inline std::vector<CurvePoint> convergence_curves(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.budget_grid.empty())
        throw std::invalid_argument("convergence_curves: budget_grid is empty");
    for (int b : spec.budget_grid)
        if (b < 1) throw std::invalid_argument("convergence_curves: budgets must be >= 1");
    const BeamGrid& grid = spec.maps.front().grid();
    const int max_budget = *std::max_element(spec.budget_grid.begin(), spec.budget_grid.end());

    std::vector<CurvePoint> points;
    struct Arm {
        AlgorithmSpec alg;
        std::size_t first_point;
    };
    std::vector<Arm> arms;
    for (const auto& a : spec.algorithms) {
        AlgorithmSpec adj = a;
        if (a.algo != Algo::Exhaustive && !apply_budget(adj, max_budget, grid)) continue;
        arms.push_back({adj, points.size()});
        for (int budget : spec.budget_grid) points.push_back({algo_name(a.algo), budget, 0.0, 0.0, 0});
    }

    struct Job {
        std::size_t arm;
        std::size_t map;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t ai = 0; ai < arms.size(); ++ai)
        for (std::size_t m = 0; m < spec.maps.size(); ++m)
            for (const auto seed : spec.seeds) jobs.push_back({ai, m, seed});

    const std::size_t n_budgets = spec.budget_grid.size();
    std::vector<double> values(jobs.size() * n_budgets, 0.0);
    detail::parallel_for(static_cast<int>(jobs.size()), spec.workers, [&](int i) {
        const auto& job = jobs[static_cast<std::size_t>(i)];
        const auto trace = run_algorithm(arms[job.arm].alg, spec.maps[job.map], job.seed);
        const auto series = best_so_far_penalties(trace, spec.maps[job.map]);
        for (std::size_t b = 0; b < n_budgets; ++b) {
            const auto n = static_cast<std::size_t>(spec.budget_grid[b]);
            const auto idx = std::min(n, series.size()) - 1;
            values[static_cast<std::size_t>(i) * n_budgets + b] = series[idx];
        }
    });

    std::vector<double> sum(points.size(), 0.0), sum2(points.size(), 0.0);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (std::size_t b = 0; b < n_budgets; ++b) {
            const auto p = arms[jobs[i].arm].first_point + b;
            const double v = values[i * n_budgets + b];
            sum[p] += v;
            sum2[p] += v * v;
            ++points[p].runs;
        }
    }
    for (std::size_t p = 0; p < points.size(); ++p) {
        if (points[p].runs == 0) continue;
        points[p].mean_penalty_db = sum[p] / points[p].runs;
        const double var = sum2[p] / points[p].runs - points[p].mean_penalty_db * points[p].mean_penalty_db;
        points[p].std_penalty_db = std::sqrt(std::max(var, 0.0));
    }
    return points;
}

/// Convergence curves for R-BO with and without the one-shot refinement.
inline std::pair<std::vector<CurvePoint>, std::vector<CurvePoint>> refinement_ablation(
    const ExperimentSpec& spec) {
    AlgorithmSpec base;
    for (const auto& a : spec.algorithms)
        if (a.algo == Algo::Rbo) base = a;
    base.algo = Algo::Rbo;

    ExperimentSpec with = spec;
    base.rbo.refine_enabled = true;
    with.algorithms = {base};
    ExperimentSpec without = spec;
    base.rbo.refine_enabled = false;
    without.algorithms = {base};
    auto curves_with = convergence_curves(with);
    auto curves_without = convergence_curves(without);
    for (auto& p : curves_with) p.algo = "rbo_refine";
    for (auto& p : curves_without) p.algo = "rbo_norefine";
    return {std::move(curves_with), std::move(curves_without)};
}

struct SweepCell {
    int n_init = 0;
    int t_iters = 0;
    double accuracy_pct = 0.0;
    double mean_penalty_db = 0.0;
    double mean_probes = 0.0;
    int runs = 0;
    bool is_best = false;
};

/// Accuracy over the (n_init, T) grid for R-BO; flags the argmax cell.
inline std::vector<SweepCell> sweep_init_iters(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.init_iter_grid.empty())
        throw std::invalid_argument("sweep_init_iters: init_iter_grid is empty");
    const BeamGrid& grid = spec.maps.front().grid();

    AlgorithmSpec base;
    for (const auto& a : spec.algorithms)
        if (a.algo == Algo::Rbo) base = a;
    base.algo = Algo::Rbo;

    std::vector<SweepCell> cells;
    struct Job {
        AlgorithmSpec alg;
        std::size_t cell;
        std::size_t map;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& [n_init, t_iters] : spec.init_iter_grid) {
        if (n_init < 1 || n_init > grid.size() || t_iters < 0)
            throw std::invalid_argument("sweep_init_iters: infeasible (n_init, T) cell");
        AlgorithmSpec adj = base;
        adj.rbo.n_init = n_init;
        adj.rbo.t_iters = t_iters;
        cells.push_back({n_init, t_iters, 0.0, 0.0, 0.0, 0, false});
        for (std::size_t m = 0; m < spec.maps.size(); ++m)
            for (const auto seed : spec.seeds) jobs.push_back({adj, cells.size() - 1, m, seed});
    }

    std::vector<std::pair<BeamPair, double>> truths;
    for (const auto& m : spec.maps) truths.push_back(true_optimum(m));

    struct Outcome {
        bool exact;
        double penalty;
        int probes;
    };
    std::vector<Outcome> outcomes(jobs.size());
    detail::parallel_for(static_cast<int>(jobs.size()), spec.workers, [&](int i) {
        const auto& job = jobs[static_cast<std::size_t>(i)];
        const auto trace = run_algorithm(job.alg, spec.maps[job.map], job.seed);
        outcomes[static_cast<std::size_t>(i)] = {trace.selected == truths[job.map].first,
                                                 penalty_db(trace, spec.maps[job.map]),
                                                 trace.probes_used};
    });

    std::vector<int> exact(cells.size(), 0);
    std::vector<double> pen(cells.size(), 0.0), probes(cells.size(), 0.0);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto c = jobs[i].cell;
        exact[c] += outcomes[i].exact ? 1 : 0;
        pen[c] += outcomes[i].penalty;
        probes[c] += outcomes[i].probes;
        ++cells[c].runs;
    }
    std::size_t best = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        cells[c].accuracy_pct = 100.0 * exact[c] / cells[c].runs;
        cells[c].mean_penalty_db = pen[c] / cells[c].runs;
        cells[c].mean_probes = probes[c] / cells[c].runs;
        if (cells[c].accuracy_pct > cells[best].accuracy_pct) best = c;
    }
    cells[best].is_best = true;
    return cells;
}

// ---------------------------------------------------------------------------
// Report serialization. CSV schemas open with `#beamopt-report v1`.
// ---------------------------------------------------------------------------

inline constexpr const char* kReportSchema = "beamopt-report v1";

inline nlohmann::ordered_json report_to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["dataset"] = report.dataset_label;
    j["grid_size"] = report.grid_size;
    j["seeds"] = report.seeds;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row{{"algo", r.algo},
                                   {"location", r.location},
                                   {"seed", r.seed},
                                   {"exact_match", r.exact_match},
                                   {"penalty_db", r.penalty_db},
                                   {"probes_used", r.probes_used},
                                   {"selected_tx", r.selected.tx},
                                   {"selected_rx", r.selected.rx},
                                   {"stopped_early", r.stopped_early},
                                   {"used_fallback", r.used_fallback}};
        if (r.failed) {
            row["failed"] = true;
            row["error"] = r.error;
        }
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    auto aggs = nlohmann::ordered_json::array();
    for (const auto& a : report.aggregates) {
        aggs.push_back(nlohmann::ordered_json{{"algo", a.algo},
                                              {"accuracy_pct", a.accuracy_pct},
                                              {"mean_penalty_db", a.mean_penalty_db},
                                              {"std_penalty_db", a.std_penalty_db},
                                              {"mean_probes", a.mean_probes},
                                              {"overhead_reduction_pct", a.overhead_reduction_pct},
                                              {"runs", a.runs},
                                              {"failed_runs", a.failed_runs}});
    }
    j["aggregates"] = std::move(aggs);
    return j;
}

inline void write_report_json(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << report_to_json(report).dump(2) << '\n';
}

inline void write_curves_csv(const std::vector<CurvePoint>& points,
                             const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << '#' << kReportSchema << '\n';
    out << "algorithm,budget,mean_penalty_db,std_penalty_db,runs\n";
    for (const auto& p : points) {
        out << p.algo << ',' << p.budget << ',' << detail::format_fixed(p.mean_penalty_db) << ','
            << detail::format_fixed(p.std_penalty_db) << ',' << p.runs << '\n';
    }
}

inline void write_heatmap_csv(const std::vector<SweepCell>& cells,
                              const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << '#' << kReportSchema << '\n';
    out << "n_init,t_iters,accuracy_pct,mean_penalty_db,mean_probes,runs,is_best\n";
    for (const auto& c : cells) {
        out << c.n_init << ',' << c.t_iters << ',' << detail::format_fixed(c.accuracy_pct, 2) << ','
            << detail::format_fixed(c.mean_penalty_db) << ',' << detail::format_fixed(c.mean_probes, 2)
            << ',' << c.runs << ',' << (c.is_best ? 1 : 0) << '\n';
    }
}

}  // namespace beamopt

#endif  // BEAMOPT_BENCH_HPP
