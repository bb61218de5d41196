#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "emdtest/cluster_testers.hpp"
#include "emdtest/exact_emd.hpp"
#include "emdtest/generators.hpp"
#include "emdtest/l1_testers.hpp"
#include "support/instances.hpp"

using namespace emdtest;

TEST_CASE("assign_to_centers") {
    const std::vector<Point> centers = {Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}};
    CHECK(assign_to_centers(Point{1.0, 0.0}, centers) == 1);
    // equidistant between centers 0 and 1: lowest index wins
    CHECK(assign_to_centers(Point{0.5, 0.0}, centers) == 0);

    SUBCASE("matches exhaustive argmin on random points") {
        Rng rng(9);
        const auto cs = testsupport::random_points(rng, 5, 2, 1.0);
        for (int rep = 0; rep < 100; ++rep) {
            const auto pts = testsupport::random_points(rng, 1, 2, 1.0);
            const std::size_t got = assign_to_centers(pts[0], cs);
            std::size_t want = 0;
            for (std::size_t i = 1; i < cs.size(); ++i) {
                if (l1_norm_distance(pts[0], cs[i]) < l1_norm_distance(pts[0], cs[want])) {
                    want = i;
                }
            }
            CHECK(got == want);
        }
    }
    SUBCASE("idempotent") {
        const std::size_t i = assign_to_centers(Point{0.2, 0.7}, centers);
        CHECK(assign_to_centers(centers[i], centers) == i);
    }
    CHECK_THROWS_AS(assign_to_centers(Point{0.0}, {}), ParamError);
}

TEST_CASE("known-centers tester batteries (planted k=4, d=2)") {
    const double eps = 0.2, span = 1.0;
    const int dim = 2;
    const double c = 3.0;

    SUBCASE("completeness") {
        auto planted = gen_clustered(4, eps / 2.0, dim, span, 0.0);
        int accepts = 0;
        for (int t = 0; t < 200; ++t) {
            SampleSource sp(planted.p, 1 + 2 * static_cast<std::uint64_t>(t));
            SampleSource sq(planted.q, 2 + 2 * static_cast<std::uint64_t>(t));
            accepts +=
                emd_test_clustered_known(sp, sq, planted.centers, eps, dim, span, c).accepted();
        }
        CHECK(accepts >= 134);
    }
    SUBCASE("soundness: cross-cluster imbalance with EMD above eps") {
        auto shifted = gen_clustered(4, eps / 4.0, dim, span, 0.25);
        CHECK(emd_exact(shifted.p, shifted.q) > eps);
        int rejects = 0;
        for (int t = 0; t < 200; ++t) {
            SampleSource sp(shifted.p, 1 + 2 * static_cast<std::uint64_t>(t));
            SampleSource sq(shifted.q, 2 + 2 * static_cast<std::uint64_t>(t));
            rejects +=
                !emd_test_clustered_known(sp, sq, shifted.centers, eps, dim, span, c).accepted();
        }
        CHECK(rejects >= 134);
    }
    SUBCASE("budget equals the collision formula at (k, eps/(d*span))") {
        auto planted = gen_clustered(4, eps / 2.0, dim, span, 0.0);
        SampleSource sp(planted.p, 1), sq(planted.q, 2);
        const TestVerdict v =
            emd_test_clustered_known(sp, sq, planted.centers, eps, dim, span, c);
        const std::uint64_t want = budget_collision(4.0, eps / (dim * span), 1.0 / 3.0, c);
        CHECK(v.samples_p == want);
        CHECK(v.samples_q == want);
    }
}

TEST_CASE("bucket bound holds for the induced center distributions") {
    // EMD(p, q) <= ||P-Q||_1/2 * (dim*span) + diameter_bound
    Rng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        const double imbalance = 0.05 * rng.next_unit();
        auto planted = gen_clustered(3, 0.05, 2, 1.0, imbalance);
        auto induced = [&](const DiscreteDistribution& d) {
            std::vector<std::pair<std::int64_t, double>> pairs;
            for (std::size_t i = 0; i < d.support_size(); ++i) {
                pairs.emplace_back(
                    static_cast<std::int64_t>(assign_to_centers(d.point(i), planted.centers)),
                    d.weight(i));
            }
            return IndexedDist::from_pairs(std::move(pairs));
        };
        const double pq_l1 = l1_distance(induced(planted.p), induced(planted.q));
        const double bound = pq_l1 / 2.0 * (2 * 1.0) + 0.05;
        CHECK(emd_exact(planted.p, planted.q) <= bound + 1e-12);
    }
}

TEST_CASE("find_representatives") {
    SUBCASE("point mass yields that single representative") {
        auto mass = new_distribution({{Point{0.3, 0.3}, 1.0}}, 2, 1.0);
        SampleSource src(mass, 1);
        auto model = find_representatives(src, 1, 0.1, 0.1);
        REQUIRE(model.has_value());
        REQUIRE(model->centers.size() == 1);
        CHECK(model->centers[0] == Point{0.3, 0.3});
        CHECK(model->diameter_bound == 0.2);  // scan guarantees (k, 2b)
        CHECK(model->unclustered_mass_bound == 0.1);
    }
    SUBCASE("k+1 spread points reject") {
        // 5 points pairwise > 2b apart; k = 4
        const double b = 0.05;
        auto spread = new_distribution({{Point{0.0}, 0.2},
                                        {Point{0.25}, 0.2},
                                        {Point{0.5}, 0.2},
                                        {Point{0.75}, 0.2},
                                        {Point{1.0}, 0.2}},
                                       1, 1.0);
        int rejects = 0;
        for (int t = 0; t < 200; ++t) {
            SampleSource src(spread, 1 + static_cast<std::uint64_t>(t));
            if (!find_representatives(src, 4, b, 0.1).has_value()) ++rejects;
        }
        CHECK(rejects >= 134);
    }
    SUBCASE("planted clusters: at most k reps, each within b of a true center") {
        const double b = 0.1;
        auto planted = gen_clustered(4, b, 2, 1.0, 0.0);
        int good = 0;
        for (int t = 0; t < 200; ++t) {
            SampleSource src(planted.p, 1 + static_cast<std::uint64_t>(t));
            auto model = find_representatives(src, 4, b, 0.1);
            if (!model || model->centers.size() > 4) continue;
            bool covered = true;
            for (const auto& r : model->centers) {
                double nearest = 1e9;
                for (const auto& c : planted.centers) {
                    nearest = std::min(nearest, l1_norm_distance(r, c));
                }
                if (nearest > b) covered = false;
            }
            if (covered) ++good;
        }
        CHECK(good >= 134);
    }
    SUBCASE("no two representatives within 2b") {
        Rng rng(55);
        for (int rep = 0; rep < 20; ++rep) {
            auto d = testsupport::random_distribution(rng, 2, 1.0, 10);
            SampleSource src(d, 100 + static_cast<std::uint64_t>(rep));
            auto model = find_representatives(src, 10, 0.07, 0.2);
            if (!model) continue;
            const auto& reps = model->centers;
            for (std::size_t i = 0; i < reps.size(); ++i) {
                for (std::size_t j = i + 1; j < reps.size(); ++j) {
                    CHECK(l1_norm_distance(reps[i], reps[j]) > 2 * 0.07);
                }
            }
        }
    }
    SUBCASE("budget formula") {
        CHECK(budget_representatives(4, 0.05, 1.0) ==
              static_cast<std::uint64_t>(std::ceil(4.0 * 2.0 / 0.05)));
        CHECK_THROWS_AS(budget_representatives(0, 0.1, 1.0), ParamError);
        CHECK_THROWS_AS(budget_representatives(4, 0.0, 1.0), ParamError);
    }
}

TEST_CASE("unknown-centers tester") {
    const double eps = 0.2, span = 1.0;
    const int dim = 2;
    const double c = 3.0;
    // promise: (k, eps/4)-clusterable
    auto planted = gen_clustered(4, eps / 4.0, dim, span, 0.0);

    SUBCASE("completeness") {
        int accepts = 0;
        for (int t = 0; t < 200; ++t) {
            SampleSource sp(planted.p, 1 + 2 * static_cast<std::uint64_t>(t));
            SampleSource sq(planted.q, 2 + 2 * static_cast<std::uint64_t>(t));
            accepts += emd_test_clustered_unknown(sp, sq, 4, eps, dim, span, c).accepted();
        }
        CHECK(accepts >= 134);
    }
    SUBCASE("soundness") {
        auto shifted = gen_clustered(4, eps / 4.0, dim, span, 0.25);
        CHECK(emd_exact(shifted.p, shifted.q) > eps);
        int rejects = 0;
        for (int t = 0; t < 200; ++t) {
            SampleSource sp(shifted.p, 1 + 2 * static_cast<std::uint64_t>(t));
            SampleSource sq(shifted.q, 2 + 2 * static_cast<std::uint64_t>(t));
            rejects += !emd_test_clustered_unknown(sp, sq, 4, eps, dim, span, c).accepted();
        }
        CHECK(rejects >= 134);
    }
    SUBCASE("total budget = scan budget + known-centers budget") {
        SampleSource sp(planted.p, 1), sq(planted.q, 2);
        const TestVerdict v = emd_test_clustered_unknown(sp, sq, 4, eps, dim, span, c);
        const std::uint64_t scan = budget_representatives(4, eps / (4.0 * dim * span), c);
        const std::uint64_t known = budget_collision(4.0, eps / (dim * span), 1.0 / 3.0, c);
        CHECK(v.samples_p == (scan + 1) / 2 + known);
        CHECK(v.samples_q == scan / 2 + known);
    }
    SUBCASE("far-from-clusterable stream propagates the scan rejection") {
        auto spread = new_distribution({{Point{0.0, 0.0}, 0.2},
                                        {Point{0.5, 0.0}, 0.2},
                                        {Point{1.0, 0.0}, 0.2},
                                        {Point{0.0, 1.0}, 0.2},
                                        {Point{1.0, 1.0}, 0.2}},
                                       2, 1.0);
        int rejects = 0;
        for (int t = 0; t < 50; ++t) {
            SampleSource sp(spread, 1 + 2 * static_cast<std::uint64_t>(t));
            SampleSource sq(spread, 2 + 2 * static_cast<std::uint64_t>(t));
            // 4 clusters cannot cover 5 points pairwise > 2b = eps/2 apart
            rejects += !emd_test_clustered_unknown(sp, sq, 4, eps, dim, span, c).accepted();
        }
        CHECK(rejects >= 34);
    }
}
