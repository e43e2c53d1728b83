#ifndef BEAMOPT_GP_HPP
#define BEAMOPT_GP_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "beamopt/domain.hpp"
#include "beamopt/rng.hpp"

namespace beamopt {

struct GpFitError : std::runtime_error {
    explicit GpFitError(const std::string& what) : std::runtime_error(what) {}
};

/// Sine-cosine embedding of a beam pair: (sin tx, cos tx, sin rx, cos rx).
/// Periodic in both angles, so -180 and +180 deg map to the same point.
using FeatureVector = Eigen::Vector4d;

inline FeatureVector featurize_angles(double tx_deg, double rx_deg) {
    const double tx = tx_deg * kDegToRad;
    const double rx = rx_deg * kDegToRad;
    return FeatureVector(std::sin(tx), std::cos(tx), std::sin(rx), std::cos(rx));
}

inline FeatureVector featurize(const BeamGrid& grid, BeamPair pair) {
    const auto [tx_deg, rx_deg] = grid.angle_of(pair);
    return featurize_angles(tx_deg, rx_deg);
}

/// Matern-5/2 kernel hyperparameters, in standardized-target units.
struct GpHyperparams {
    double signal_variance = 1.0;
    double length_scale = 0.5;
    double noise_variance = 1e-2;

    static constexpr double matern_nu = 2.5;

    void validate() const {
        if (!(signal_variance > 0.0) || !(length_scale > 0.0) || !(noise_variance > 0.0))
            throw std::invalid_argument("GP hyperparameters must be strictly positive");
    }
};

// Box constraints for the log-space hyperparameter search.
inline constexpr double kHyperLowerBound = 1e-3;
inline constexpr double kHyperUpperBound = 1e3;

/// k(a,b) = sf2 * (1 + sqrt5*r/l + 5r^2/(3l^2)) * exp(-sqrt5*r/l), r = |a-b|.
inline double matern52(const FeatureVector& a, const FeatureVector& b, const GpHyperparams& h) {
    const double sqrt5 = 2.23606797749978969;
    const double r = (a - b).norm();
    const double s = sqrt5 * r / h.length_scale;
    return h.signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

namespace detail {

inline Eigen::MatrixXd pairwise_distances(const Eigen::MatrixX4d& A, const Eigen::MatrixX4d& B) {
    const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
    const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
    Eigen::MatrixXd D2 = a2.replicate(1, B.rows()) + b2.transpose().replicate(A.rows(), 1) -
                         2.0 * (A * B.transpose());
    return D2.cwiseMax(0.0).cwiseSqrt();
}

inline Eigen::MatrixXd matern52_from_distances(const Eigen::MatrixXd& R, const GpHyperparams& h) {
    const double sqrt5 = 2.23606797749978969;
    const Eigen::ArrayXXd s = (sqrt5 / h.length_scale) * R.array();
    return (h.signal_variance * (1.0 + s + s.square() / 3.0) * (-s).exp()).matrix();
}

struct CholFactor {
    Eigen::MatrixXd L;
    double jitter = 0.0;
};

/// Cholesky of K + noise*I with jitter escalation: first attempt adds no
/// jitter, then 1e-10 scaled up tenfold per retry until 1e-6 * sf2.
inline CholFactor chol_with_jitter(const Eigen::MatrixXd& K, double noise_variance,
                                   double signal_variance) {
    const auto n = K.rows();
    const double max_jitter = 1e-6 * signal_variance;
    double jitter = 0.0;
    while (true) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += noise_variance + jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) return {Eigen::MatrixXd(llt.matrixL()), jitter};
        if (jitter == 0.0) {
            jitter = 1e-10;
        } else {
            jitter *= 10.0;
            if (jitter > max_jitter)
                throw GpFitError("kernel matrix not positive definite after jitter escalation (n=" +
                                 std::to_string(n) + ")");
        }
    }
}

}  // namespace detail

/// LML of observations y under covariance with Cholesky factor L:
///   -1/2 y'a - sum_i log L_ii - n/2 log 2pi,  a = (LL')^-1 y.
inline double gp_log_marginal_likelihood(const Eigen::MatrixXd& L, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& alpha) {
    const double half_log_2pi = 0.91893853320467274178;
    return -0.5 * y.dot(alpha) - L.diagonal().array().log().sum() -
           static_cast<double>(y.size()) * half_log_2pi;
}

/// Convenience overload: factorizes `cov` (already including noise) itself.
inline double gp_log_marginal_likelihood(const Eigen::MatrixXd& cov, const Eigen::VectorXd& y) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw GpFitError("covariance not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::VectorXd alpha = llt.solve(y);
    return gp_log_marginal_likelihood(L, y, alpha);
}

/// Exact GP posterior over sine-cosine beam features.
///
/// Targets are standardized to zero mean / unit variance before fitting
/// (constant targets fall back to scale 1); hyperparameters therefore live in
/// standardized units. Predictions are de-standardized back to dB.
class GpModel {
public:
    struct Prediction {
        std::vector<double> mu;
        std::vector<double> sigma;
    };

    static GpModel fit(const std::vector<FeatureVector>& X, const std::vector<double>& y_db,
                       const GpHyperparams& hyper) {
        hyper.validate();
        if (X.empty() || X.size() != y_db.size())
            throw std::invalid_argument("GP fit needs matching, nonempty X and y");
        GpModel m;
        m.hyper_ = hyper;
        const auto n = static_cast<Eigen::Index>(X.size());
        m.X_.resize(n, 4);
        for (Eigen::Index i = 0; i < n; ++i) m.X_.row(i) = X[static_cast<std::size_t>(i)];

        Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_db.data(), n);
        if (!y.allFinite()) throw GpFitError("GP targets contain non-finite values");
        m.y_mean_ = y.mean();
        const double var = (y.array() - m.y_mean_).square().mean();
        m.y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
        m.y_std_ = (y.array() - m.y_mean_) / m.y_scale_;

        const Eigen::MatrixXd R = detail::pairwise_distances(m.X_, m.X_);
        const Eigen::MatrixXd K = detail::matern52_from_distances(R, hyper);
        auto chol = detail::chol_with_jitter(K, hyper.noise_variance, hyper.signal_variance);
        m.L_ = std::move(chol.L);
        m.jitter_ = chol.jitter;
        m.alpha_ = m.L_.transpose().triangularView<Eigen::Upper>().solve(
            m.L_.triangularView<Eigen::Lower>().solve(m.y_std_));
        return m;
    }

    int size() const { return static_cast<int>(X_.rows()); }
    const GpHyperparams& hyper() const { return hyper_; }
    double y_mean() const { return y_mean_; }
    double y_scale() const { return y_scale_; }
    double jitter() const { return jitter_; }
    const Eigen::VectorXd& y_standardized() const { return y_std_; }
    const Eigen::MatrixXd& cholesky_factor() const { return L_; }

    double standardize(double y_db) const { return (y_db - y_mean_) / y_scale_; }
    double destandardize(double y_std) const { return y_mean_ + y_scale_ * y_std; }

    /// Posterior mean/std in standardized units. Variances are clamped at 0.
    Prediction predict_standardized(const std::vector<FeatureVector>& queries) const {
        const auto m = static_cast<Eigen::Index>(queries.size());
        Eigen::MatrixX4d Q(m, 4);
        for (Eigen::Index i = 0; i < m; ++i) Q.row(i) = queries[static_cast<std::size_t>(i)];

        const Eigen::MatrixXd R = detail::pairwise_distances(X_, Q);   // n x m
        const Eigen::MatrixXd Ks = detail::matern52_from_distances(R, hyper_);
        const Eigen::VectorXd mu = Ks.transpose() * alpha_;
        const Eigen::MatrixXd V = L_.triangularView<Eigen::Lower>().solve(Ks);  // n x m
        const Eigen::VectorXd var =
            (hyper_.signal_variance - V.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);

        Prediction out;
        out.mu.resize(queries.size());
        out.sigma.resize(queries.size());
        for (Eigen::Index i = 0; i < m; ++i) {
            out.mu[static_cast<std::size_t>(i)] = mu(i);
            out.sigma[static_cast<std::size_t>(i)] = std::sqrt(var(i));
        }
        return out;
    }

    /// Posterior mean/std de-standardized to dB.
    Prediction predict(const std::vector<FeatureVector>& queries) const {
        Prediction p = predict_standardized(queries);
        for (auto& v : p.mu) v = destandardize(v);
        for (auto& v : p.sigma) v *= y_scale_;
        return p;
    }

    double log_marginal_likelihood() const {
        return gp_log_marginal_likelihood(L_, y_std_, alpha_);
    }

    /// Debug dump; not a stability-guaranteed format.
    nlohmann::ordered_json dump_json() const {
        nlohmann::ordered_json j;
        j["hyperparams"] = {{"signal_variance", hyper_.signal_variance},
                            {"length_scale", hyper_.length_scale},
                            {"noise_variance", hyper_.noise_variance}};
        j["y_mean"] = y_mean_;
        j["y_scale"] = y_scale_;
        j["jitter"] = jitter_;
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < X_.rows(); ++i)
            rows.push_back({X_(i, 0), X_(i, 1), X_(i, 2), X_(i, 3)});
        j["features"] = rows;
        j["y_standardized"] = std::vector<double>(y_std_.data(), y_std_.data() + y_std_.size());
        return j;
    }

private:
    GpModel() = default;

    GpHyperparams hyper_;
    Eigen::MatrixX4d X_;
    Eigen::VectorXd y_std_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    Eigen::MatrixXd L_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

namespace detail {

struct NelderMeadResult {
    Eigen::Vector3d x;
    double f = std::numeric_limits<double>::infinity();
    int evals = 0;
};

/// Bounded Nelder-Mead minimizer over 3 parameters. `fn` must return +inf for
/// infeasible points. Tracks the best point ever evaluated, not just the
/// final simplex.
template <typename F>
NelderMeadResult nelder_mead_min(F&& fn, const Eigen::Vector3d& x0, double step, int max_evals,
                                 double ftol) {
    constexpr int n = 3;
    std::array<Eigen::Vector3d, n + 1> xs;
    std::array<double, n + 1> fs;
    NelderMeadResult best;

    auto eval = [&](const Eigen::Vector3d& x) {
        const double f = fn(x);
        ++best.evals;
        if (f < best.f) {
            best.f = f;
            best.x = x;
        }
        return f;
    };

    xs[0] = x0;
    fs[0] = eval(xs[0]);
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i) + 1] = x0;
        xs[static_cast<std::size_t>(i) + 1](i) += step;
        fs[static_cast<std::size_t>(i) + 1] = eval(xs[static_cast<std::size_t>(i) + 1]);
    }

    while (best.evals < max_evals) {
        std::array<int, n + 1> order{0, 1, 2, 3};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)]; });
        std::array<Eigen::Vector3d, n + 1> xs2;
        std::array<double, n + 1> fs2;
        for (int i = 0; i <= n; ++i) {
            xs2[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            fs2[static_cast<std::size_t>(i)] = fs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        }
        xs = xs2;
        fs = fs2;

        if (std::isfinite(fs[n]) && fs[n] - fs[0] < ftol) break;

        const Eigen::Vector3d centroid = (xs[0] + xs[1] + xs[2]) / 3.0;
        const Eigen::Vector3d xr = centroid + (centroid - xs[n]);
        const double fr = eval(xr);
        if (fr < fs[0]) {
            const Eigen::Vector3d xe = centroid + 2.0 * (centroid - xs[n]);
            const double fe = eval(xe);
            if (fe < fr) {
                xs[n] = xe;
                fs[n] = fe;
            } else {
                xs[n] = xr;
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            xs[n] = xr;
            fs[n] = fr;
        } else {
            const Eigen::Vector3d xc = centroid + 0.5 * (xs[n] - centroid);
            const double fc = eval(xc);
            if (fc < fs[n]) {
                xs[n] = xc;
                fs[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    xs[static_cast<std::size_t>(i)] = xs[0] + 0.5 * (xs[static_cast<std::size_t>(i)] - xs[0]);
                    fs[static_cast<std::size_t>(i)] = eval(xs[static_cast<std::size_t>(i)]);
                }
            }
        }
    }
    return best;
}

}  // namespace detail

struct HyperoptResult {
    GpHyperparams hyper;
    /// True when every evaluation failed numerically and h0 was returned.
    bool fell_back = false;
};

/// Maximizes the log marginal likelihood over (sf2, l, sn2) in log-space,
/// clamped to [1e-3, 1e3] per parameter. Runs Nelder-Mead from h0 plus
/// `restarts` log-uniform random starts; never returns hyperparameters whose
/// LML is below LML(h0) - 1e-12. Below 2 observations h0 is returned as-is.
inline HyperoptResult optimize_hyperparams(const std::vector<FeatureVector>& X,
                                           const std::vector<double>& y_db,
                                           const GpHyperparams& h0, int restarts, Rng& rng) {
    h0.validate();
    if (X.size() < 2) return {h0, false};

    const auto n = static_cast<Eigen::Index>(X.size());
    Eigen::MatrixX4d Xm(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) Xm.row(i) = X[static_cast<std::size_t>(i)];
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_db.data(), n);
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    const double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    const Eigen::VectorXd y_std = (y.array() - mean) / scale;

    const Eigen::MatrixXd R = detail::pairwise_distances(Xm, Xm);

    const double lo = std::log(kHyperLowerBound), hi = std::log(kHyperUpperBound);
    auto clamp = [&](const Eigen::Vector3d& u) {
        return Eigen::Vector3d(std::clamp(u(0), lo, hi), std::clamp(u(1), lo, hi),
                               std::clamp(u(2), lo, hi));
    };
    auto to_hyper = [](const Eigen::Vector3d& u) {
        return GpHyperparams{std::exp(u(0)), std::exp(u(1)), std::exp(u(2))};
    };
    auto neg_lml = [&](const Eigen::Vector3d& u_raw) -> double {
        const GpHyperparams h = to_hyper(clamp(u_raw));
        try {
            const Eigen::MatrixXd K = detail::matern52_from_distances(R, h);
            auto chol = detail::chol_with_jitter(K, h.noise_variance, h.signal_variance);
            const Eigen::VectorXd alpha = chol.L.transpose().triangularView<Eigen::Upper>().solve(
                chol.L.triangularView<Eigen::Lower>().solve(y_std));
            const double lml = gp_log_marginal_likelihood(chol.L, y_std, alpha);
            return std::isfinite(lml) ? -lml : std::numeric_limits<double>::infinity();
        } catch (const GpFitError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // Baseline at the unclamped h0: the result must never be worse than this.
    double lml_h0;
    try {
        const Eigen::MatrixXd K0 = detail::matern52_from_distances(R, h0);
        auto chol0 = detail::chol_with_jitter(K0, h0.noise_variance, h0.signal_variance);
        const Eigen::VectorXd alpha0 = chol0.L.transpose().triangularView<Eigen::Upper>().solve(
            chol0.L.triangularView<Eigen::Lower>().solve(y_std));
        lml_h0 = gp_log_marginal_likelihood(chol0.L, y_std, alpha0);
    } catch (const GpFitError&) {
        lml_h0 = -std::numeric_limits<double>::infinity();
    }

    std::vector<Eigen::Vector3d> starts;
    starts.push_back(clamp(Eigen::Vector3d(std::log(h0.signal_variance), std::log(h0.length_scale),
                                           std::log(h0.noise_variance))));
    for (int r = 0; r < restarts; ++r) {
        starts.emplace_back(uniform_real(rng, lo, hi), uniform_real(rng, lo, hi),
                            uniform_real(rng, lo, hi));
    }

    Eigen::Vector3d best_u = starts.front();
    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        const auto res = detail::nelder_mead_min(neg_lml, s, 0.25, 60, 1e-9);
        if (res.f < best_f) {
            best_f = res.f;
            best_u = res.x;
        }
    }

    if (!std::isfinite(best_f)) return {h0, true};
    if (-best_f < lml_h0) return {h0, false};
    return {to_hyper(clamp(best_u)), false};
}

inline HyperoptResult optimize_hyperparams(const std::vector<FeatureVector>& X,
                                           const std::vector<double>& y_db,
                                           const GpHyperparams& h0, int restarts,
                                           std::uint64_t seed) {
    Rng rng = seeded_rng(seed);
    return optimize_hyperparams(X, y_db, h0, restarts, rng);
}

}  // namespace beamopt

#endif  // BEAMOPT_GP_HPP
