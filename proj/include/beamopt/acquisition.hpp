#ifndef BEAMOPT_ACQUISITION_HPP
#define BEAMOPT_ACQUISITION_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "beamopt/domain.hpp"
#include "beamopt/gp.hpp"

namespace beamopt {

inline double normal_pdf(double z) {
    return 0.3989422804014326779 * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

/// EI knobs. mu, sigma and f_best share the GP's standardized target units,
/// which keeps xi meaningful across locations with different dB ranges.
struct AcquisitionParams {
    double xi = 0.05;
    double ei_stop_threshold = 1e-8;
};

/// EI(x) = (mu - f_best - xi) Phi(Z) + sigma phi(Z), Z = (mu - f_best - xi)/sigma.
/// A zero-variance point is already known, so sigma = 0 yields 0.
inline double expected_improvement(double mu, double sigma, double f_best, double xi) {
    if (!(sigma > 0.0)) return 0.0;
    const double margin = mu - f_best - xi;
    const double z = margin / sigma;
    return std::max(margin * normal_cdf(z) + sigma * normal_pdf(z), 0.0);
}

struct Selection {
    BeamPair pair;
    double max_ei = 0.0;
};

/// EI argmax over `candidates`; ties go to the lexicographically smaller
/// (tx, rx). f_best_std is the best observed target in standardized units.
inline Selection select_next(const GpModel& model, const BeamGrid& grid,
                             const std::vector<BeamPair>& candidates, double f_best_std,
                             const AcquisitionParams& params) {
    if (candidates.empty()) throw std::invalid_argument("select_next: empty candidate set");

    std::vector<FeatureVector> feats;
    feats.reserve(candidates.size());
    for (const auto& c : candidates) feats.push_back(featurize(grid, c));
    const auto pred = model.predict_standardized(feats);

    Selection best{candidates.front(), -1.0};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double ei = expected_improvement(pred.mu[i], pred.sigma[i], f_best_std, params.xi);
        if (ei > best.max_ei || (ei == best.max_ei && candidates[i] < best.pair)) {
            best.max_ei = ei;
            best.pair = candidates[i];
        }
    }
    return best;
}

}  // namespace beamopt

#endif  // BEAMOPT_ACQUISITION_HPP
