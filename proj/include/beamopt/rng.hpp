#ifndef BEAMOPT_RNG_HPP
#define BEAMOPT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace beamopt {

// std::mt19937_64 output is pinned by the standard; the distributions below
// are hand-rolled so that seeded runs produce identical streams on every
// platform and standard library.
using Rng = std::mt19937_64;

inline Rng seeded_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n) via rejection sampling. n must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Standard normal draw (Box-Muller, cosine branch). Consumes two uniforms.
inline double normal01(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

/// First `count` elements of a seeded Fisher-Yates shuffle of [0, population).
/// Prefix property: for a fixed generator state, a larger `count` extends the
/// smaller sample rather than reshuffling it.
inline std::vector<int> sample_without_replacement(Rng& rng, int population, int count) {
    std::vector<int> idx(static_cast<std::size_t>(population));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < count; ++i) {
        const auto j = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(population - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(count));
    return idx;
}

}  // namespace beamopt

#endif  // BEAMOPT_RNG_HPP
