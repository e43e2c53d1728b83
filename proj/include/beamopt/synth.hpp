#ifndef BEAMOPT_SYNTH_HPP
#define BEAMOPT_SYNTH_HPP

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamopt/domain.hpp"
#include "beamopt/rng.hpp"

namespace beamopt {

/// One propagation path of the geometric channel.
struct PathSpec {
    double gain_db = 0.0;
    double aod_deg = 0.0;   // departure angle, in [-90, 90]
    double aoa_deg = 0.0;   // arrival angle, in [-180, 180)
    double phase_rad = 0.0;
};

/// Synthetic AoD-AoA map generator settings. Antennas form half-wavelength
/// ULAs; the TX steers electronically across its sector while the RX array is
/// rotated mechanically through the full circle.
struct SynthSpec {
    int tx_antennas = 16;
    int rx_antennas = 16;
    std::vector<PathSpec> paths;
    double noise_floor_db = -40.0;  // relative to the map peak
    double dither_db = 0.5;         // uniform +- additive dB noise; 0 disables
    std::uint64_t seed = 0;

    void validate() const {
        if (tx_antennas < 1 || rx_antennas < 1)
            throw std::invalid_argument("antenna counts must be >= 1");
        if (paths.empty()) throw std::invalid_argument("need at least one path");
        for (const auto& p : paths) {
            if (!std::isfinite(p.gain_db) || !std::isfinite(p.aod_deg) || !std::isfinite(p.aoa_deg) ||
                !std::isfinite(p.phase_rad))
                throw std::invalid_argument("path parameters must be finite");
        }
    }
};

/// Unit-norm ULA response at half-wavelength spacing:
/// [exp(j pi m sin theta)]_{m=0..n-1} / sqrt(n).
inline Eigen::VectorXcd steering_vector(int n_antennas, double angle_deg) {
    if (n_antennas < 1) throw std::invalid_argument("steering_vector: n must be >= 1");
    const double s = std::sin(angle_deg * kDegToRad);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    Eigen::VectorXcd v(n_antennas);
    for (int m = 0; m < n_antennas; ++m) {
        const double phase = 3.14159265358979323846 * m * s;
        v(m) = std::complex<double>(std::cos(phase), std::sin(phase)) * norm;
    }
    return v;
}

namespace detail {

inline double wrap180(double deg) {
    double d = std::fmod(deg + 180.0, 360.0);
    if (d < 0.0) d += 360.0;
    return d - 180.0;
}

/// a(ref)^H a(other) for unit-norm steering vectors, as a function of the two
/// sine-space coordinates.
inline std::complex<double> array_correlation(int n, double sin_ref, double sin_other) {
    const double d = 3.14159265358979323846 * (sin_other - sin_ref);
    std::complex<double> acc(0.0, 0.0);
    for (int m = 0; m < n; ++m) acc += std::complex<double>(std::cos(m * d), std::sin(m * d));
    return acc / static_cast<double>(n);
}

/// Front-hemisphere element/backplane pattern (amplitude): cos^2(delta/2).
/// A bare ULA cannot tell front from back (sin is symmetric about 90 deg);
/// the mechanically rotated receiver can, so its back lobe is suppressed.
inline double element_pattern(double delta_deg) {
    const double c = std::cos(0.5 * delta_deg * kDegToRad);
    return c * c;
}

}  // namespace detail

namespace detail {

/// Coherent beam-pair power field P(i,j) = |sum_l alpha_l c_tx(i,l) c_rx(j,l)|^2
/// scaled by the tx*rx array gain, in linear power. TX beams combine
/// electronically (codebook of steering vectors at the grid angles); RX beams
/// model a rotated array with a front-facing element pattern.
inline Eigen::MatrixXd coherent_power_field(const BeamGrid& grid, int tx_antennas, int rx_antennas,
                                            const std::vector<PathSpec>& paths) {
    const int nt = grid.tx_count(), nr = grid.rx_count();
    const auto L = paths.size();

    std::vector<std::complex<double>> alpha(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double a = std::pow(10.0, paths[l].gain_db / 20.0);
        alpha[l] = std::complex<double>(a * std::cos(paths[l].phase_rad),
                                        a * std::sin(paths[l].phase_rad));
    }

    Eigen::MatrixXcd ctx(nt, static_cast<Eigen::Index>(L));
    for (int i = 0; i < nt; ++i) {
        const double sin_beam = std::sin(grid.tx_angle(i) * kDegToRad);
        for (std::size_t l = 0; l < L; ++l) {
            const double sin_path = std::sin(paths[l].aod_deg * kDegToRad);
            ctx(i, static_cast<Eigen::Index>(l)) = array_correlation(tx_antennas, sin_beam, sin_path);
        }
    }

    // RX: mechanical rotation; the array always looks broadside, the incident
    // wave arrives at the rotation-relative angle delta.
    Eigen::MatrixXcd crx(nr, static_cast<Eigen::Index>(L));
    for (int j = 0; j < nr; ++j) {
        for (std::size_t l = 0; l < L; ++l) {
            const double delta = wrap180(paths[l].aoa_deg - grid.rx_angle(j));
            crx(j, static_cast<Eigen::Index>(l)) =
                array_correlation(rx_antennas, 0.0, std::sin(delta * kDegToRad)) *
                element_pattern(delta);
        }
    }

    const double array_gain =
        std::sqrt(static_cast<double>(tx_antennas) * static_cast<double>(rx_antennas));
    Eigen::MatrixXd power(nt, nr);
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nr; ++j) {
            std::complex<double> amp(0.0, 0.0);
            for (std::size_t l = 0; l < L; ++l)
                amp += alpha[l] * ctx(i, static_cast<Eigen::Index>(l)) * crx(j, static_cast<Eigen::Index>(l));
            power(i, j) = std::norm(amp * array_gain);
        }
    }
    return power;
}

/// dB conversion, peak-relative noise floor, and seeded dB dither.
inline Eigen::MatrixXd finish_power_map(Eigen::MatrixXd linear_power, double noise_floor_db,
                                        double dither_db, std::uint64_t seed) {
    Eigen::MatrixXd db = (linear_power.array().max(1e-300)).log10() * 10.0;
    const double floor = db.maxCoeff() + noise_floor_db;
    Rng rng = seeded_rng(seed);
    for (Eigen::Index i = 0; i < db.rows(); ++i) {
        for (Eigen::Index j = 0; j < db.cols(); ++j) {
            double v = db(i, j);
            if (dither_db > 0.0) v += uniform_real(rng, -dither_db, dither_db);
            db(i, j) = std::max(v, floor);
        }
    }
    return db;
}

}  // namespace detail

/// Renders the full beam-pair power map for a geometric multipath channel,
/// in dB, floored at noise_floor_db below the peak, plus seeded dB dither.
inline PowerMap generate_map(const BeamGrid& grid, const SynthSpec& spec,
                             std::string location_id = "SYN00") {
    spec.validate();
    Eigen::MatrixXd db =
        detail::finish_power_map(detail::coherent_power_field(grid, spec.tx_antennas,
                                                              spec.rx_antennas, spec.paths),
                                 spec.noise_floor_db, spec.dither_db, spec.seed);
    return PowerMap(std::move(location_id), grid, std::move(db));
}

/// Randomization ranges for generate_campaign. A "path" here is a scattering
/// cluster: several sub-rays with small angular spread around a common
/// center, which broadens lobes and raises sidelobe floors the way cluttered
/// indoor environments do.
struct CampaignRanges {
    int min_paths = 1;
    int max_paths = 4;
    double los_aod_lo = -40.0, los_aod_hi = 40.0;
    double los_aoa_lo = -170.0, los_aoa_hi = 170.0;
    double reflection_gain_lo = -16.0, reflection_gain_hi = -5.0;
    double reflection_aod_lo = -45.0, reflection_aod_hi = 45.0;
    double reflection_aoa_lo = -180.0, reflection_aoa_hi = 180.0;
    int subpaths_min = 4;
    int subpaths_max = 8;
    double aod_spread_deg = 8.0;
    double aoa_spread_deg = 12.0;
    double gain_jitter_db = 2.0;
    // Diffuse scattering: weak rays that give the map texture everywhere
    // instead of a flat plateau. Most of them scatter forward, concentrated
    // around the LoS direction, which raises the sidelobe floor near the
    // mainlobe into a broad dome the way cluttered rooms do.
    int diffuse_rays_min = 24;
    int diffuse_rays_max = 48;
    double diffuse_gain_lo = -14.0, diffuse_gain_hi = -5.0;
    double diffuse_forward_fraction = 0.7;
    double diffuse_forward_spread_deg = 22.0;
    double noise_floor_db = -40.0;
    double dither_db = 0.75;
    // Effective array sizes for the campaign: smaller than the hardware's
    // element count to reproduce the broad measured lobes that calibration
    // error, phase quantization and rich scattering produce in practice.
    int tx_antennas = 12;
    int rx_antennas = 8;
};

/// n maps, each with one dominant LoS-like cluster plus 0-3 weaker reflected
/// clusters and a diffuse scatter field; deterministic per seed.
///
/// Sub-rays within a cluster add coherently (one extended reflector patch at
/// a common delay); distinct clusters and diffuse rays add in power, the way
/// delay-separated arrivals decorrelate across a wideband measurement.
inline std::vector<PowerMap> generate_campaign(int n_locations, const BeamGrid& grid,
                                               const CampaignRanges& ranges, std::uint64_t seed) {
    if (n_locations < 1) throw std::invalid_argument("n_locations must be >= 1");
    Rng rng = seeded_rng(seed);
    std::vector<PowerMap> maps;
    maps.reserve(static_cast<std::size_t>(n_locations));
    const int id_width = n_locations >= 100 ? 3 : 2;

    auto make_cluster = [&](double gain_db, double aod_deg, double aoa_deg) {
        const int n_sub =
            ranges.subpaths_min + static_cast<int>(uniform_below(
                                      rng, static_cast<std::uint64_t>(ranges.subpaths_max - ranges.subpaths_min + 1)));
        const double per_ray = gain_db - 10.0 * std::log10(static_cast<double>(n_sub));
        const double cluster_phase = uniform_real(rng, 0.0, 6.283185307179586);
        std::vector<PathSpec> rays;
        for (int s = 0; s < n_sub; ++s) {
            PathSpec ray;
            ray.gain_db = per_ray + uniform_real(rng, -ranges.gain_jitter_db, ranges.gain_jitter_db);
            ray.aod_deg = std::clamp(aod_deg + uniform_real(rng, -ranges.aod_spread_deg, ranges.aod_spread_deg),
                                     -88.0, 88.0);
            ray.aoa_deg = detail::wrap180(aoa_deg + uniform_real(rng, -ranges.aoa_spread_deg, ranges.aoa_spread_deg));
            ray.phase_rad = cluster_phase;
            rays.push_back(ray);
        }
        return rays;
    };

    for (int k = 0; k < n_locations; ++k) {
        const std::uint64_t dither_seed = rng();
        Eigen::MatrixXd power = Eigen::MatrixXd::Zero(grid.tx_count(), grid.rx_count());

        const int n_paths =
            ranges.min_paths + static_cast<int>(uniform_below(
                                   rng, static_cast<std::uint64_t>(ranges.max_paths - ranges.min_paths + 1)));
        const double los_aod = uniform_real(rng, ranges.los_aod_lo, ranges.los_aod_hi);
        const double los_aoa = uniform_real(rng, ranges.los_aoa_lo, ranges.los_aoa_hi);
        power += detail::coherent_power_field(grid, ranges.tx_antennas, ranges.rx_antennas,
                                              make_cluster(0.0, los_aod, los_aoa));
        for (int p = 1; p < n_paths; ++p) {
            power += detail::coherent_power_field(
                grid, ranges.tx_antennas, ranges.rx_antennas,
                make_cluster(uniform_real(rng, ranges.reflection_gain_lo, ranges.reflection_gain_hi),
                             uniform_real(rng, ranges.reflection_aod_lo, ranges.reflection_aod_hi),
                             uniform_real(rng, ranges.reflection_aoa_lo, ranges.reflection_aoa_hi)));
        }

        const int n_diffuse =
            ranges.diffuse_rays_min + static_cast<int>(uniform_below(
                                          rng, static_cast<std::uint64_t>(ranges.diffuse_rays_max - ranges.diffuse_rays_min + 1)));
        std::vector<PathSpec> ray(1);
        for (int d = 0; d < n_diffuse; ++d) {
            ray[0].gain_db = uniform_real(rng, ranges.diffuse_gain_lo, ranges.diffuse_gain_hi);
            if (uniform01(rng) < ranges.diffuse_forward_fraction) {
                const double spread = ranges.diffuse_forward_spread_deg;
                ray[0].aod_deg = std::clamp(los_aod + uniform_real(rng, -spread, spread), -88.0, 88.0);
                ray[0].aoa_deg = detail::wrap180(los_aoa + uniform_real(rng, -spread, spread));
            } else {
                ray[0].aod_deg = uniform_real(rng, -88.0, 88.0);
                ray[0].aoa_deg = uniform_real(rng, -180.0, 180.0);
            }
            ray[0].phase_rad = 0.0;
            power += detail::coherent_power_field(grid, ranges.tx_antennas, ranges.rx_antennas, ray);
        }

        char id[32];
        std::snprintf(id, sizeof(id), "SYN%0*d", id_width, k + 1);
        maps.emplace_back(id, grid,
                          detail::finish_power_map(std::move(power), ranges.noise_floor_db,
                                                   ranges.dither_db, dither_seed));
    }
    return maps;
}

}  // namespace beamopt

#endif  // BEAMOPT_SYNTH_HPP
