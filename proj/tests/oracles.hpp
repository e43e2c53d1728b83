// Independent oracles for the test suites. Everything here deliberately
// avoids the library's solver paths: posteriors use explicit dense inverses,
// the LML uses an LU determinant, EI uses Monte-Carlo, and steering
// correlations use the Dirichlet closed form.
#ifndef BEAMOPT_TESTS_ORACLES_HPP
#define BEAMOPT_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "beamopt/rng.hpp"

namespace oracles {

/// Matern-5/2 written out independently (long form, scalar loops).
inline double matern52_reference(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                                 double signal_variance, double length_scale) {
    double sq = 0.0;
    for (int i = 0; i < 4; ++i) sq += (a(i) - b(i)) * (a(i) - b(i));
    const double r = std::sqrt(sq);
    const double s = std::sqrt(5.0) * r / length_scale;
    return signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

struct DensePosterior {
    Eigen::VectorXd mu;      // standardized units
    Eigen::VectorXd sigma;   // standardized units
    double lml = 0.0;        // on the standardized targets
    double y_mean = 0.0;
    double y_scale = 1.0;
};

/// Full GP posterior via explicit matrix inversion and an LU log-determinant.
/// Mirrors the library's standardization convention so outputs are directly
/// comparable, but shares none of its linear algebra path.
inline DensePosterior dense_gp_posterior(const std::vector<Eigen::Vector4d>& X,
                                         const std::vector<double>& y,
                                         const std::vector<Eigen::Vector4d>& queries,
                                         double signal_variance, double length_scale,
                                         double noise_variance) {
    const auto n = static_cast<Eigen::Index>(X.size());
    DensePosterior out;

    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) yv(i) = y[static_cast<std::size_t>(i)];
    out.y_mean = yv.mean();
    const double var = (yv.array() - out.y_mean).square().mean();
    out.y_scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    const Eigen::VectorXd ys = (yv.array() - out.y_mean) / out.y_scale;

    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            K(i, j) = matern52_reference(X[static_cast<std::size_t>(i)], X[static_cast<std::size_t>(j)],
                                         signal_variance, length_scale);
    K.diagonal().array() += noise_variance;

    const Eigen::MatrixXd Kinv = K.inverse();
    const Eigen::VectorXd alpha = Kinv * ys;

    const auto m = static_cast<Eigen::Index>(queries.size());
    out.mu.resize(m);
    out.sigma.resize(m);
    for (Eigen::Index q = 0; q < m; ++q) {
        Eigen::VectorXd k(n);
        for (Eigen::Index i = 0; i < n; ++i)
            k(i) = matern52_reference(X[static_cast<std::size_t>(i)], queries[static_cast<std::size_t>(q)],
                                      signal_variance, length_scale);
        out.mu(q) = k.dot(alpha);
        const double v = signal_variance - k.dot(Kinv * k);
        out.sigma(q) = std::sqrt(std::max(v, 0.0));
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    const double log_det = lu.matrixLU().diagonal().array().abs().log().sum();
    out.lml = -0.5 * ys.dot(alpha) - 0.5 * log_det -
              0.5 * static_cast<double>(n) * std::log(2.0 * 3.14159265358979323846);
    return out;
}

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// E[max(G - f_best - xi, 0)], G ~ N(mu, sigma^2), by direct sampling.
inline MonteCarloEstimate mc_expected_improvement(double mu, double sigma, double f_best, double xi,
                                                  long n_samples, std::uint64_t seed) {
    beamopt::Rng rng = beamopt::seeded_rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const double g = mu + sigma * beamopt::normal01(rng);
        const double v = std::max(g - f_best - xi, 0.0);
        sum += v;
        sum2 += v * v;
    }
    MonteCarloEstimate est;
    est.mean = sum / static_cast<double>(n_samples);
    const double var = sum2 / static_cast<double>(n_samples) - est.mean * est.mean;
    est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(n_samples));
    return est;
}

/// |a(th1)^H a(th2)| for unit-norm half-wavelength ULA steering vectors:
/// |sin(N pi d / 2) / (N sin(pi d / 2))| with d = sin th2 - sin th1.
inline double dirichlet_correlation(int n, double th1_deg, double th2_deg) {
    const double deg = 3.14159265358979323846 / 180.0;
    const double d = std::sin(th2_deg * deg) - std::sin(th1_deg * deg);
    const double x = 3.14159265358979323846 * d / 2.0;
    if (std::abs(std::sin(x)) < 1e-15) return 1.0;
    return std::abs(std::sin(n * x) / (n * std::sin(x)));
}

/// Standard normal CDF/PDF for the brute-force EI scan, written separately
/// from the library's helpers.
inline double phi_cdf(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }
inline double phi_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}
inline double ei_closed_form(double mu, double sigma, double f_best, double xi) {
    if (sigma <= 0.0) return 0.0;
    const double m = mu - f_best - xi;
    const double z = m / sigma;
    return m * phi_cdf(z) + sigma * phi_pdf(z);
}

}  // namespace oracles

#endif  // BEAMOPT_TESTS_ORACLES_HPP
