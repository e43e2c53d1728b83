#ifndef BEAMOPT_BASELINES_HPP
#define BEAMOPT_BASELINES_HPP

#include <Eigen/Core>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "beamopt/align.hpp"
#include "beamopt/domain.hpp"
#include "beamopt/rng.hpp"

namespace beamopt {

/// Probes every cell once in lexicographic order; the exact baseline.
inline AlignmentTrace exhaustive_sweep(ProbeOracle& oracle) {
    const BeamGrid& grid = oracle.grid();
    AlignmentTrace trace;
    int step = 0;
    for (const auto& pair : grid.all_pairs())
        trace.records.push_back({++step, pair, oracle.probe(pair), ProbePhase::Init});
    detail::finalize_selection(trace);
    return trace;
}

/// Uniform-without-replacement probing under a total budget. When refining,
/// the nominal refinement cost is reserved out of the budget and a one-shot
/// neighborhood rescan runs around the best measured cell. A budget at or
/// above the grid size caps at one full sweep (refinement is then redundant).
/// Larger budgets extend smaller ones probe-for-probe at the same seed.
inline AlignmentTrace random_probing(ProbeOracle& oracle, int budget, bool refine_enabled,
                                     std::uint64_t seed, double refine_tx_deg = 10.0,
                                     double refine_rx_deg = 10.0) {
    const BeamGrid& grid = oracle.grid();
    const bool full_coverage = budget >= grid.size();
    if (full_coverage) refine_enabled = false;
    const int refine_cost =
        refine_enabled ? nominal_refinement_cost(grid, refine_tx_deg, refine_rx_deg) : 0;
    if (!full_coverage && budget < refine_cost + 1)
        throw std::invalid_argument("random_probing: budget too small for the refinement stage");

    const int n_random = std::min(budget - refine_cost, grid.size());
    Rng rng = seeded_rng(seed);
    AlignmentTrace trace;
    int step = 0;
    for (int cell : sample_without_replacement(rng, grid.size(), n_random)) {
        const auto pair = grid.pair_of_cell(cell);
        trace.records.push_back({++step, pair, oracle.probe(pair), ProbePhase::Init});
    }
    if (refine_enabled) {
        detail::finalize_selection(trace);
        for (const auto& pair :
             refinement_neighborhood(grid, trace.selected, refine_tx_deg, refine_rx_deg))
            trace.records.push_back({++step, pair, oracle.probe(pair), ProbePhase::Refine});
    }
    detail::finalize_selection(trace);
    return trace;
}

// ---------------------------------------------------------------------------
// ROMP: regularized orthogonal matching pursuit over a fixed dictionary.
// ---------------------------------------------------------------------------

enum class Dictionary { Dft2d, Identity };

inline const char* dictionary_name(Dictionary d) {
    return d == Dictionary::Dft2d ? "dft2d" : "identity";
}

/// Real orthonormal Fourier basis of R^n: a constant atom, cos/sin pairs per
/// frequency, and the alternating atom when n is even.
inline Eigen::MatrixXd fourier_basis(int n) {
    Eigen::MatrixXd B(n, n);
    const double two_pi = 6.28318530717958647692;
    int col = 0;
    B.col(col++).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    const double amp = std::sqrt(2.0 / static_cast<double>(n));
    for (int k = 1; 2 * k < n; ++k) {
        for (int i = 0; i < n; ++i) B(i, col) = amp * std::cos(two_pi * k * i / n);
        ++col;
        for (int i = 0; i < n; ++i) B(i, col) = amp * std::sin(two_pi * k * i / n);
        ++col;
    }
    if (n % 2 == 0) {
        for (int i = 0; i < n; ++i) B(i, col) = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(n));
        ++col;
    }
    return B;
}

/// Separable 2-D real Fourier dictionary over tx-major vectorized maps:
/// atom (p,q) evaluated at cell (i,j) is B_tx(i,p) * B_rx(j,q). Orthonormal.
inline Eigen::MatrixXd fourier_dictionary_2d(int n_tx, int n_rx) {
    const Eigen::MatrixXd Bt = fourier_basis(n_tx);
    const Eigen::MatrixXd Br = fourier_basis(n_rx);
    Eigen::MatrixXd D(n_tx * n_rx, n_tx * n_rx);
    for (int p = 0; p < n_tx; ++p)
        for (int q = 0; q < n_rx; ++q)
            for (int i = 0; i < n_tx; ++i)
                for (int j = 0; j < n_rx; ++j)
                    D(i * n_rx + j, p * n_rx + q) = Bt(i, p) * Br(j, q);
    return D;
}

inline Eigen::MatrixXd make_dictionary(Dictionary kind, const BeamGrid& grid) {
    if (kind == Dictionary::Dft2d) return fourier_dictionary_2d(grid.tx_count(), grid.rx_count());
    return Eigen::MatrixXd::Identity(grid.size(), grid.size());
}

struct RompResult {
    Eigen::VectorXd coefficients;
    std::vector<int> support;
    bool used_pseudoinverse = false;
    int iterations = 0;
};

/// Recovers a sparse coefficient vector c with signal ~= dictionary * c from
/// point samples (index, value) of the signal. Greedy ROMP: per iteration,
/// correlate the residual with the dictionary, keep the k largest magnitudes,
/// select the maximal-energy "comparable" run (every pair within a factor 2),
/// merge it into the support and least-squares refit. Stops once the support
/// reaches 2k or the residual drops below 1e-6.
inline RompResult romp_recover(const std::vector<std::pair<int, double>>& samples,
                               const Eigen::MatrixXd& dictionary, int k) {
    if (k < 1) throw std::invalid_argument("romp_recover: k must be >= 1");
    if (static_cast<int>(samples.size()) < k)
        throw std::invalid_argument("romp_recover: need at least k samples");

    const auto m = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index n = dictionary.cols();
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd u(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& [idx, val] = samples[static_cast<std::size_t>(i)];
        if (idx < 0 || idx >= dictionary.rows())
            throw std::out_of_range("romp_recover: sample index out of dictionary range");
        A.row(i) = dictionary.row(idx);
        u(i) = val;
    }

    RompResult result;
    result.coefficients = Eigen::VectorXd::Zero(n);
    std::vector<char> in_support(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd residual = u;
    Eigen::VectorXd x_support;

    constexpr double residual_tol = 1e-6;
    constexpr int max_iterations = 64;

    while (result.iterations < max_iterations &&
           static_cast<int>(result.support.size()) < 2 * k && residual.norm() > residual_tol) {
        ++result.iterations;
        const Eigen::VectorXd corr = A.transpose() * residual;

        // k largest-magnitude correlations, nonzero only.
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        const int keep = std::min<int>(k, static_cast<int>(n));
        std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](int a, int b) {
            const double ca = std::abs(corr(a)), cb = std::abs(corr(b));
            return ca > cb || (ca == cb && a < b);
        });
        std::vector<int> top;
        for (int i = 0; i < keep; ++i)
            if (std::abs(corr(order[static_cast<std::size_t>(i)])) > 0.0)
                top.push_back(order[static_cast<std::size_t>(i)]);
        if (top.empty()) break;

        // Maximal-energy comparable run: |u_first| <= 2 |u_last| within the
        // magnitude-sorted window.
        std::size_t best_a = 0, best_b = 0;
        double best_energy = -1.0;
        for (std::size_t a = 0; a < top.size(); ++a) {
            double energy = 0.0;
            for (std::size_t b = a; b < top.size(); ++b) {
                const double va = std::abs(corr(top[a])), vb = std::abs(corr(top[b]));
                if (va > 2.0 * vb) break;
                energy += vb * vb;
                if (energy > best_energy) {
                    best_energy = energy;
                    best_a = a;
                    best_b = b;
                }
            }
        }

        bool grew = false;
        for (std::size_t i = best_a; i <= best_b; ++i) {
            if (!in_support[static_cast<std::size_t>(top[i])]) {
                in_support[static_cast<std::size_t>(top[i])] = 1;
                result.support.push_back(top[i]);
                grew = true;
            }
        }
        if (!grew) break;

        Eigen::MatrixXd As(m, static_cast<Eigen::Index>(result.support.size()));
        for (std::size_t i = 0; i < result.support.size(); ++i)
            As.col(static_cast<Eigen::Index>(i)) = A.col(result.support[i]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
        if (qr.rank() < As.cols()) {
            result.used_pseudoinverse = true;
            x_support = As.completeOrthogonalDecomposition().solve(u);
        } else {
            x_support = qr.solve(u);
        }
        residual = u - As * x_support;
    }

    for (std::size_t i = 0; i < result.support.size(); ++i)
        result.coefficients(result.support[i]) = x_support(static_cast<Eigen::Index>(i));
    return result;
}

struct RompConfig {
    int sparsity_k = 8;
    Dictionary dictionary = Dictionary::Dft2d;
    int budget = 80;
    bool refine_enabled = true;
    std::uint64_t seed = 0;
    double refine_tx_deg = 10.0;
    double refine_rx_deg = 10.0;

    void validate() const {
        if (sparsity_k < 1) throw std::invalid_argument("sparsity_k must be >= 1");
        if (budget < sparsity_k) throw std::invalid_argument("budget must be >= sparsity_k");
    }
};

/// Compressive-sensing alignment baseline: random cell probes are treated as
/// point samples of the vectorized linear-power map, a sparse representation
/// is recovered in the chosen dictionary, and the one-shot refinement rescans
/// around the reconstruction argmax. The answer is the measured argmax; a
/// failed recovery degrades to the best measured cell (flagged).
inline AlignmentTrace romp_align(ProbeOracle& oracle, const RompConfig& cfg) {
    cfg.validate();
    const BeamGrid& grid = oracle.grid();
    const bool full_coverage = cfg.budget >= grid.size();
    const bool refine_enabled = cfg.refine_enabled && !full_coverage;
    const int refine_cost =
        refine_enabled ? nominal_refinement_cost(grid, cfg.refine_tx_deg, cfg.refine_rx_deg) : 0;
    const int n_samples = std::min(std::max(cfg.budget - refine_cost, cfg.sparsity_k), grid.size());

    Rng rng = seeded_rng(cfg.seed);
    AlignmentTrace trace;
    int step = 0;
    std::vector<std::pair<int, double>> samples;  // (cell, linear power)
    for (int cell : sample_without_replacement(rng, grid.size(), n_samples)) {
        const auto pair = grid.pair_of_cell(cell);
        const double db = oracle.probe(pair);
        trace.records.push_back({++step, pair, db, ProbePhase::Init});
        samples.emplace_back(cell, std::pow(10.0, db / 10.0));
    }

    BeamPair center{};
    bool have_center = false;
    try {
        const Eigen::MatrixXd D = make_dictionary(cfg.dictionary, grid);
        const auto rec = romp_recover(samples, D, cfg.sparsity_k);
        const Eigen::VectorXd reconstruction = D * rec.coefficients;
        if (reconstruction.allFinite()) {
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < reconstruction.size(); ++i)
                if (reconstruction(i) > reconstruction(best)) best = i;
            center = grid.pair_of_cell(static_cast<int>(best));
            have_center = true;
        }
    } catch (const std::exception&) {
        // fall through to the measured fallback
    }
    if (!have_center) {
        trace.used_fallback = true;
        detail::finalize_selection(trace);
        center = trace.selected;
    }

    if (refine_enabled) {
        for (const auto& pair :
             refinement_neighborhood(grid, center, cfg.refine_tx_deg, cfg.refine_rx_deg))
            trace.records.push_back({++step, pair, oracle.probe(pair), ProbePhase::Refine});
    }
    detail::finalize_selection(trace);
    return trace;
}

}  // namespace beamopt

#endif  // BEAMOPT_BASELINES_HPP
