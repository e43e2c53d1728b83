#include <catch2/catch.hpp>

#include "beamopt/acquisition.hpp"
#include "beamopt/rng.hpp"
#include "oracles.hpp"

using namespace beamopt;

TEST_CASE("expected improvement closed form", "[acquisition]") {
    SECTION("at the incumbent with xi = 0, EI is sigma * phi(0)") {
        CHECK(expected_improvement(0.0, 1.0, 0.0, 0.0) == Approx(0.3989422804014327).epsilon(1e-12));
    }
    SECTION("zero variance yields zero, improving or not") {
        CHECK(expected_improvement(-1.0, 0.0, 0.0, 0.0) == 0.0);
        CHECK(expected_improvement(3.0, 0.0, 0.0, 0.05) == 0.0);
    }
    SECTION("unit margin, unit sigma: Phi(1) + phi(1)") {
        CHECK(expected_improvement(1.0, 1.0, 0.0, 0.0) == Approx(1.0833154705876863).epsilon(1e-12));
    }
    SECTION("agrees with Monte-Carlo sampling within 3 standard errors") {
        const struct {
            double mu, sigma, f_best, xi;
        } cases[] = {{0.0, 1.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0}, {-0.5, 0.7, 0.3, 0.05},
                     {2.0, 0.2, 1.0, 0.5}, {-2.0, 1.5, 1.0, 0.05}};
        int i = 0;
        for (const auto& c : cases) {
            const auto mc = oracles::mc_expected_improvement(c.mu, c.sigma, c.f_best, c.xi,
                                                             1000000, 1000 + i++);
            const double ei = expected_improvement(c.mu, c.sigma, c.f_best, c.xi);
            CHECK(std::abs(ei - mc.mean) <= 3.0 * mc.std_error + 1e-12);
        }
    }
}

TEST_CASE("expected improvement properties", "[acquisition]") {
    SECTION("nonnegative everywhere") {
        Rng rng = seeded_rng(71);
        for (int i = 0; i < 2000; ++i) {
            const double ei = expected_improvement(uniform_real(rng, -20, 20), uniform_real(rng, 0, 5),
                                                   uniform_real(rng, -20, 20), uniform_real(rng, 0, 1));
            CHECK(ei >= 0.0);
        }
    }
    SECTION("nondecreasing in sigma when the margin is nonpositive") {
        for (double margin : {-3.0, -1.0, -0.25, 0.0}) {
            double prev = expected_improvement(margin, 1e-9, 0.0, 0.0);
            for (double sigma = 0.05; sigma <= 5.0; sigma += 0.05) {
                const double ei = expected_improvement(margin, sigma, 0.0, 0.0);
                CHECK(ei >= prev - 1e-12);
                prev = ei;
            }
        }
    }
    SECTION("scale equivariance: scaling margin and sigma by c scales EI by c") {
        Rng rng = seeded_rng(73);
        for (int i = 0; i < 500; ++i) {
            const double margin = uniform_real(rng, -4, 4);
            const double sigma = uniform_real(rng, 0.01, 3.0);
            const double c = uniform_real(rng, 0.1, 10.0);
            const double base = expected_improvement(margin, sigma, 0.0, 0.0);
            const double scaled = expected_improvement(c * margin, c * sigma, 0.0, 0.0);
            CHECK(scaled == Approx(c * base).epsilon(1e-9).margin(1e-12));
        }
    }
}

TEST_CASE("select_next over candidate sets", "[acquisition]") {
    const auto grid = BeamGrid::default_grid();
    const auto model =
        GpModel::fit({featurize(grid, {9, 18}), featurize(grid, {3, 5})}, {-3.0, -20.0},
                     GpHyperparams{1.0, 0.5, 1e-2});
    const double f_best = model.standardize(-3.0);
    const AcquisitionParams params;

    SECTION("a single candidate is returned") {
        const auto sel = select_next(model, grid, {{7, 7}}, f_best, params);
        CHECK(sel.pair == BeamPair{7, 7});
    }
    SECTION("symmetric candidates tie-break lexicographically") {
        // (9,17) and (9,19) are mirror images around a lone training point at
        // (9,18), so their predictions coincide exactly.
        const auto lone = GpModel::fit({featurize(grid, {9, 18})}, {-3.0}, GpHyperparams{});
        const auto sel =
            select_next(lone, grid, {{9, 19}, {9, 17}}, lone.standardize(-3.0), params);
        CHECK(sel.pair == BeamPair{9, 17});
    }
    SECTION("empty candidates are rejected") {
        CHECK_THROWS_AS(select_next(model, grid, {}, f_best, params), std::invalid_argument);
    }
    SECTION("matches a brute-force EI scan on random candidate sets") {
        Rng rng = seeded_rng(79);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<BeamPair> candidates;
            std::vector<char> used(static_cast<std::size_t>(grid.size()), 0);
            while (candidates.size() < 100) {
                const int c = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(grid.size())));
                if (used[static_cast<std::size_t>(c)]) continue;
                used[static_cast<std::size_t>(c)] = 1;
                candidates.push_back(grid.pair_of_cell(c));
            }
            const auto sel = select_next(model, grid, candidates, f_best, params);

            // independent scan: per-candidate prediction + reference EI
            BeamPair best{};
            double best_ei = -1.0;
            for (const auto& cand : candidates) {
                const auto p = model.predict_standardized({featurize(grid, cand)});
                const double ei = oracles::ei_closed_form(p.mu[0], p.sigma[0], f_best, params.xi);
                if (ei > best_ei || (ei == best_ei && cand < best)) {
                    best_ei = ei;
                    best = cand;
                }
            }
            CHECK(sel.pair == best);
            CHECK(sel.max_ei == Approx(best_ei).epsilon(1e-9).margin(1e-12));
        }
    }
}
