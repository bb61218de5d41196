#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "emdtest/coarsening.hpp"
#include "emdtest/exact_emd.hpp"
#include "emdtest/generators.hpp"
#include "support/instances.hpp"

using namespace emdtest;

TEST_CASE("cell_of follows the half-open convention") {
    CHECK(cell_of(Point{0.0}, 3, 1, 1.0).cell == std::vector<std::int64_t>{0});
    // boundary 0.5 belongs to the upper cell at level 1
    CHECK(cell_of(Point{0.5}, 1, 1, 1.0).cell == std::vector<std::int64_t>{1});
    // top boundary closed: span maps to the last cell
    CHECK(cell_of(Point{1.0}, 2, 1, 1.0).cell == std::vector<std::int64_t>{3});
    // d=2, span=4, level 2: cell side 1
    CHECK(cell_of(Point{3.2, 0.1}, 2, 2, 4.0).cell == std::vector<std::int64_t>{3, 0});

    CHECK_THROWS_AS(cell_of(Point{1.5}, 1, 1, 1.0), DomainError);
    CHECK_THROWS_AS(cell_of(Point{0.5}, 0, 1, 1.0), DomainError);
}

TEST_CASE("cell keys round-trip and reject deep grids") {
    const CellIndex idx{4, {3, 9, 15}};
    const auto key = cell_key(idx, 3);
    CHECK(cell_from_key(key, 4, 3).cell == idx.cell);
    CHECK_THROWS_AS(cell_key(CellIndex{40, {1, 1}}, 2), ConfigError);
}

TEST_CASE("coarsen preserves mass and contracts l1") {
    Rng rng(41);
    SUBCASE("all mass below span/2 lands in one cell") {
        auto p = new_distribution({{Point{0.1}, 0.5}, {Point{0.3}, 0.5}}, 1, 1.0);
        auto level1 = coarsen(p, 1);
        REQUIRE(level1.cells.size() == 1);
        CHECK(level1.cells[0].first == 0);
        CHECK(level1.cells[0].second == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("fine enough levels relabel the support") {
        auto p = new_distribution({{Point{0.1}, 0.4}, {Point{0.9}, 0.6}}, 1, 1.0);
        auto q = new_distribution({{Point{0.1}, 0.7}, {Point{0.9}, 0.3}}, 1, 1.0);
        auto pc = coarsen(p, 4);
        auto qc = coarsen(q, 4);
        CHECK(l1_distance(pc, qc) == doctest::Approx(l1_distance(p, q)).epsilon(1e-12));
    }
    SUBCASE("mass conservation and monotone contraction on random pairs") {
        for (int rep = 0; rep < 25; ++rep) {
            const int dim = 1 + static_cast<int>(rng.next_below(2));
            auto p = testsupport::random_distribution(rng, dim, 1.0, 8);
            auto q = testsupport::random_distribution(rng, dim, 1.0, 8);
            double prev = l1_distance(p, q);  // the i -> infinity limit
            for (int level = 6; level >= 1; --level) {
                auto pc = coarsen(p, level);
                auto qc = coarsen(q, level);
                CHECK(pc.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
                const double dist = l1_distance(pc, qc);
                CHECK(dist <= prev + 1e-12);  // coarser never increases l1
                prev = dist;
            }
        }
    }
}

TEST_CASE("mapped sample streams converge to the exact coarsening") {
    // The tester consumes coarsened draws by mapping raw points through
    // cell_of; the empirical cell distribution must approach coarsen(p, i).
    Rng gen(43);
    auto p = testsupport::random_distribution(gen, 2, 1.0, 6);
    const int level = 3;
    SampleSource src(p, 99);
    std::map<std::int64_t, double> counts;
    const int n = 20000;
    for (int s = 0; s < n; ++s) {
        counts[cell_key(cell_of(src.draw(), level, 2, 1.0), 2)] += 1.0 / n;
    }
    const CoarseningLevel exact = coarsen(p, level);
    double dist = 0.0;
    for (const auto& [key, mass] : exact.cells) dist += std::abs(mass - counts[key]);
    for (const auto& [key, mass] : counts) {
        if (exact.mass_of(key) == 0.0) dist += mass;
    }
    CHECK(dist < 0.05);
}

TEST_CASE("coarsening level count") {
    // ratio 2*span*dim/eps = 8 -> 3 levels
    CHECK(coarsening_levels(1, 1.0, 0.25) == 3);
    // eps >= 2*span*dim -> no levels
    CHECK(coarsening_levels(1, 1.0, 2.0) == 0);
    CHECK(coarsening_levels(1, 1.0, 3.0) == 0);
    // non-power-of-two ratio rounds up
    CHECK(coarsening_levels(1, 1.0, 0.3) == 3);  // ratio 6.67 -> ceil(2.74) = 3
}

TEST_CASE("coarsening_bound dominates the exact EMD") {
    SUBCASE("equal distributions give exactly eps/2") {
        auto p = new_distribution({{Point{0.3}, 0.5}, {Point{0.8}, 0.5}}, 1, 1.0);
        CHECK(coarsening_bound(p, p, 0.25) == 0.125);
    }
    SUBCASE("hard pair") {
        const double eps = 0.1;
        auto [p, q] = gen_hard_pair_1d(1.0, 0.2);
        CHECK(coarsening_bound(p, q, eps) >= emd_exact(p, q));
    }
    SUBCASE("random instances at both dims and eps values") {
        Rng rng(42);
        for (double eps : {0.1, 0.5}) {
            for (int dim : {1, 2}) {
                for (int rep = 0; rep < 15; ++rep) {
                    auto p = testsupport::random_distribution(rng, dim, 1.0, 6);
                    auto q = testsupport::random_distribution(rng, dim, 1.0, 6);
                    CHECK(coarsening_bound(p, q, eps) >= emd_exact(p, q) - 1e-12);
                }
            }
        }
    }
}
