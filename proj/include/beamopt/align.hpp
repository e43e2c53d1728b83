#ifndef BEAMOPT_ALIGN_HPP
#define BEAMOPT_ALIGN_HPP

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamopt/acquisition.hpp"
#include "beamopt/domain.hpp"
#include "beamopt/gp.hpp"
#include "beamopt/rng.hpp"

namespace beamopt {

/// Power-feedback interface: the only thing alignment algorithms may consult.
/// probe_count() increments once per probe call, repeats included.
class ProbeOracle {
public:
    virtual ~ProbeOracle() = default;
    virtual double probe(BeamPair pair) = 0;
    virtual const BeamGrid& grid() const = 0;
    virtual int probe_count() const = 0;
};

/// Oracle backed by a fixed PowerMap; deterministic.
class MapOracle final : public ProbeOracle {
public:
    explicit MapOracle(const PowerMap& map) : map_(&map) {}

    double probe(BeamPair pair) override {
        ++count_;
        return map_->at(pair);
    }
    const BeamGrid& grid() const override { return map_->grid(); }
    int probe_count() const override { return count_; }

private:
    const PowerMap* map_;
    int count_ = 0;
};

struct RboConfig {
    int n_init = 15;
    int t_iters = 50;
    AcquisitionParams acquisition{};
    double refine_tx_deg = 10.0;
    double refine_rx_deg = 10.0;
    bool refine_enabled = true;
    std::uint64_t seed = 0;
    int hyperopt_restarts = 3;
    int refit_every = 1;
    GpHyperparams init_hyper{};

    void validate(const BeamGrid& grid) const {
        if (n_init < 1) throw std::invalid_argument("n_init must be >= 1");
        if (n_init > grid.size()) throw std::invalid_argument("n_init exceeds grid size");
        if (t_iters < 0) throw std::invalid_argument("t_iters must be >= 0");
        if (refit_every < 1) throw std::invalid_argument("refit_every must be >= 1");
        if (hyperopt_restarts < 0) throw std::invalid_argument("hyperopt_restarts must be >= 0");
        if (!(acquisition.xi >= 0.0)) throw std::invalid_argument("xi must be >= 0");
        if (!(acquisition.ei_stop_threshold > 0.0))
            throw std::invalid_argument("ei_stop_threshold must be > 0");
    }
};

/// Ordered probe log plus the final selection.
struct AlignmentTrace {
    std::vector<ProbeRecord> records;
    BeamPair selected{};
    double selected_power_db = 0.0;
    bool stopped_early = false;
    bool used_fallback = false;  // GP fit failure (R-BO) or recovery failure (ROMP)
    int probes_used = 0;
};

/// n distinct pairs, uniform without replacement, deterministic per generator
/// state.
inline std::vector<BeamPair> sample_init(const BeamGrid& grid, int n, Rng& rng) {
    if (n < 1 || n > grid.size())
        throw std::invalid_argument("sample_init: n must be in [1, grid size]");
    const auto cells = sample_without_replacement(rng, grid.size(), n);
    std::vector<BeamPair> out;
    out.reserve(cells.size());
    for (int c : cells) out.push_back(grid.pair_of_cell(c));
    return out;
}

inline std::vector<BeamPair> sample_init(const BeamGrid& grid, int n, std::uint64_t seed) {
    Rng rng = seeded_rng(seed);
    return sample_init(grid, n, rng);
}

namespace detail {

inline double axis_distance_deg(double a, double b, bool wraps, double period) {
    double d = std::abs(a - b);
    if (wraps) d = std::min(d, period - d);
    return d;
}

}  // namespace detail

/// All pairs within +-tx_deg / +-rx_deg of `center`, including the center.
/// Non-wrapping axes clamp at the sector edge (fewer cells); wrapping axes go
/// around the seam. Paper grid, interior center: 5 x 3 = 15 cells.
inline std::vector<BeamPair> refinement_neighborhood(const BeamGrid& grid, BeamPair center,
                                                     double tx_deg, double rx_deg) {
    grid.require(center);
    const auto [ctx, crx] = grid.angle_of(center);
    const double tol = 1e-9;

    std::vector<int> tx_idx, rx_idx;
    for (int i = 0; i < grid.tx_count(); ++i) {
        if (detail::axis_distance_deg(grid.tx_angle(i), ctx, grid.tx_wraps(), grid.tx_period_deg()) <=
            tx_deg + tol)
            tx_idx.push_back(i);
    }
    for (int j = 0; j < grid.rx_count(); ++j) {
        if (detail::axis_distance_deg(grid.rx_angle(j), crx, grid.rx_wraps(), grid.rx_period_deg()) <=
            rx_deg + tol)
            rx_idx.push_back(j);
    }

    std::vector<BeamPair> out;
    out.reserve(tx_idx.size() * rx_idx.size());
    for (int i : tx_idx)
        for (int j : rx_idx) out.push_back({i, j});
    return out;  // lexicographic by construction
}

/// Size of the refinement rescan at an interior center; the constant probe
/// cost budgeted for the refinement stage (15 on the default 19x36 grid).
inline int nominal_refinement_cost(const BeamGrid& grid, double tx_deg = 10.0,
                                   double rx_deg = 10.0) {
    const BeamPair center{grid.tx_count() / 2, grid.rx_count() / 2};
    return static_cast<int>(refinement_neighborhood(grid, center, tx_deg, rx_deg).size());
}

namespace detail {

/// Argmax over measured records; ties go to the lexicographically smaller pair.
inline void finalize_selection(AlignmentTrace& trace) {
    if (trace.records.empty()) throw std::logic_error("trace has no probes");
    const ProbeRecord* best = &trace.records.front();
    for (const auto& r : trace.records) {
        if (r.power_db > best->power_db ||
            (r.power_db == best->power_db && r.pair < best->pair))
            best = &r;
    }
    trace.selected = best->pair;
    trace.selected_power_db = best->power_db;
    trace.probes_used = static_cast<int>(trace.records.size());
}

}  // namespace detail

/// Runs the refined-BO alignment loop against `oracle`:
///   1. n_init random probes seed the GP;
///   2. up to t_iters EI-guided probes over the unprobed cells, refitting the
///      GP each step and re-optimizing hyperparameters every refit_every
///      iterations; stops early once max EI < ei_stop_threshold;
///   3. a one-shot rescan of the +-refine_*_deg neighborhood around the
///      posterior-mean argmax over all cells (repeat probes re-counted);
///   4. the answer is the argmax over measured powers only.
///
/// A GP fit failure degrades to random probing for the remaining iteration
/// budget (flagged via used_fallback). Deterministic per (oracle map, seed).
inline AlignmentTrace run_rbo(ProbeOracle& oracle, const RboConfig& cfg) {
    const BeamGrid& grid = oracle.grid();
    cfg.validate(grid);

    Rng rng = seeded_rng(cfg.seed);
    AlignmentTrace trace;
    std::vector<char> probed(static_cast<std::size_t>(grid.size()), 0);
    std::vector<FeatureVector> X;
    std::vector<double> y;
    int step = 0;

    auto probe_cell = [&](BeamPair pair, ProbePhase phase) {
        const double p = oracle.probe(pair);
        trace.records.push_back({++step, pair, p, phase});
        probed[static_cast<std::size_t>(grid.cell_index(pair))] = 1;
        return p;
    };
    auto unprobed_cells = [&]() {
        std::vector<BeamPair> out;
        for (int c = 0; c < grid.size(); ++c)
            if (!probed[static_cast<std::size_t>(c)]) out.push_back(grid.pair_of_cell(c));
        return out;
    };
    auto best_measured = [&]() {
        const ProbeRecord* best = &trace.records.front();
        for (const auto& r : trace.records)
            if (r.power_db > best->power_db || (r.power_db == best->power_db && r.pair < best->pair))
                best = &r;
        return best;
    };

    for (const auto& pair : sample_init(grid, cfg.n_init, rng)) {
        const double p = probe_cell(pair, ProbePhase::Init);
        X.push_back(featurize(grid, pair));
        y.push_back(p);
    }

    GpHyperparams hyper = cfg.init_hyper;
    std::optional<GpModel> model;
    try {
        model = GpModel::fit(X, y, hyper);
    } catch (const GpFitError&) {
        trace.used_fallback = true;
    }

    for (int t = 1; t <= cfg.t_iters; ++t) {
        auto candidates = unprobed_cells();
        if (candidates.empty()) break;

        if (trace.used_fallback) {
            // Degraded mode: spend the remaining budget on random probes.
            const auto pick = candidates[uniform_below(rng, candidates.size())];
            probe_cell(pick, ProbePhase::Bo);
            continue;
        }

        const double f_best_std = model->standardize(best_measured()->power_db);
        const auto sel = select_next(*model, grid, candidates, f_best_std, cfg.acquisition);
        if (sel.max_ei < cfg.acquisition.ei_stop_threshold) {
            trace.stopped_early = true;
            break;
        }

        const double p = probe_cell(sel.pair, ProbePhase::Bo);
        X.push_back(featurize(grid, sel.pair));
        y.push_back(p);

        try {
            if (t % cfg.refit_every == 0) {
                const auto opt = optimize_hyperparams(X, y, hyper, cfg.hyperopt_restarts, rng);
                hyper = opt.hyper;
            }
            model = GpModel::fit(X, y, hyper);
        } catch (const GpFitError&) {
            trace.used_fallback = true;
        }
    }

    if (cfg.refine_enabled) {
        BeamPair center{};
        if (!trace.used_fallback && model) {
            // Posterior-mean argmax over every cell, probed or not.
            const auto pairs = grid.all_pairs();
            std::vector<FeatureVector> feats;
            feats.reserve(pairs.size());
            for (const auto& p : pairs) feats.push_back(featurize(grid, p));
            const auto pred = model->predict_standardized(feats);
            std::size_t best_i = 0;
            for (std::size_t i = 1; i < pairs.size(); ++i)
                if (pred.mu[i] > pred.mu[best_i]) best_i = i;
            center = pairs[best_i];
        } else {
            center = best_measured()->pair;
        }
        for (const auto& p : refinement_neighborhood(grid, center, cfg.refine_tx_deg, cfg.refine_rx_deg))
            probe_cell(p, ProbePhase::Refine);
    }

    detail::finalize_selection(trace);
    return trace;
}

/// Received-power gap (dB) between the exhaustive optimum and the selection.
inline double penalty_db(const AlignmentTrace& trace, const PowerMap& truth) {
    return true_optimum(truth).second - truth.at(trace.selected);
}

// ---------------------------------------------------------------------------
// JSON-lines trace export: one record per line, then one summary line.
// ---------------------------------------------------------------------------

inline void write_trace_jsonl(const AlignmentTrace& trace, const BeamGrid& grid, std::ostream& out) {
    for (const auto& r : trace.records) {
        const auto [tx_deg, rx_deg] = grid.angle_of(r.pair);
        nlohmann::ordered_json j{{"step", r.step},          {"tx", r.pair.tx},
                                 {"rx", r.pair.rx},         {"tx_deg", tx_deg},
                                 {"rx_deg", rx_deg},        {"power_db", r.power_db},
                                 {"phase", probe_phase_name(r.phase)}};
        out << j.dump() << '\n';
    }
    const auto [stx, srx] = grid.angle_of(trace.selected);
    nlohmann::ordered_json summary{
        {"summary",
         nlohmann::ordered_json{{"selected_tx", trace.selected.tx},
                                {"selected_rx", trace.selected.rx},
                                {"selected_tx_deg", stx},
                                {"selected_rx_deg", srx},
                                {"selected_power_db", trace.selected_power_db},
                                {"probes_used", trace.probes_used},
                                {"stopped_early", trace.stopped_early},
                                {"used_fallback", trace.used_fallback}}}};
    out << summary.dump() << '\n';
}

inline std::string trace_to_jsonl(const AlignmentTrace& trace, const BeamGrid& grid) {
    std::ostringstream ss;
    write_trace_jsonl(trace, grid, ss);
    return ss.str();
}

inline AlignmentTrace read_trace_jsonl(std::istream& in) {
    AlignmentTrace trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        if (j.contains("summary")) {
            const auto& s = j.at("summary");
            trace.selected = {s.at("selected_tx").get<int>(), s.at("selected_rx").get<int>()};
            trace.selected_power_db = s.at("selected_power_db").get<double>();
            trace.probes_used = s.at("probes_used").get<int>();
            trace.stopped_early = s.at("stopped_early").get<bool>();
            trace.used_fallback = s.at("used_fallback").get<bool>();
        } else {
            ProbeRecord r;
            r.step = j.at("step").get<int>();
            r.pair = {j.at("tx").get<int>(), j.at("rx").get<int>()};
            r.power_db = j.at("power_db").get<double>();
            const auto phase = j.at("phase").get<std::string>();
            r.phase = phase == "init" ? ProbePhase::Init
                                      : (phase == "bo" ? ProbePhase::Bo : ProbePhase::Refine);
            trace.records.push_back(r);
        }
    }
    return trace;
}

}  // namespace beamopt

#endif  // BEAMOPT_ALIGN_HPP
