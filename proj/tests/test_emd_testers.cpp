#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "emdtest/emd_testers.hpp"
#include "emdtest/exact_emd.hpp"
#include "emdtest/generators.hpp"
#include "support/instances.hpp"

using namespace emdtest;

namespace {

DiscreteDistribution five_point() {
    return new_distribution({{Point{0.05}, 0.2},
                             {Point{0.3}, 0.25},
                             {Point{0.55}, 0.15},
                             {Point{0.7}, 0.3},
                             {Point{0.95}, 0.1}},
                            1, 1.0);
}

}  // namespace

TEST_CASE("level arithmetic matches the multi-resolution schedule") {
    EmdTestConfig cfg{1, 1.0, 0.5, L1Strategy::Auto, 1.0};
    CHECK(emd_test_levels(cfg) == 2);  // ceil(log2(4))
    // eps * 2^(i-2) / (span * dim * levels) at i=1: 0.5 * 0.5 / 2 = 1/8
    CHECK(emd_test_level_eps(cfg, 1) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
    CHECK(emd_test_level_eps(cfg, 2) == doctest::Approx(1.0 / 4.0).epsilon(1e-15));
    CHECK(emd_test_level_delta(cfg) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

    EmdTestConfig quarter{1, 1.0, 0.25, L1Strategy::Auto, 1.0};
    CHECK(emd_test_levels(quarter) == 3);
    CHECK(emd_test_level_delta(quarter) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("subroutine choice") {
    CHECK(choose_l1_subroutine(1, 2.0, 0.1, 1.0 / 9.0, 1.0) == L1Strategy::Plugin);
    CHECK(choose_l1_subroutine(2, 16.0, 0.1, 1.0 / 9.0, 1.0) == L1Strategy::Plugin);
    CHECK(choose_l1_subroutine(6, 4096.0, 0.1, 1.0 / 9.0, 1.0) == L1Strategy::Collision);
    CHECK(choose_l1_subroutine(7, 128.0, 0.1, 1.0 / 9.0, 1.0) == L1Strategy::Collision);
    // 3 <= d <= 5: the smaller computed budget wins
    for (double n : {8.0, 4096.0, 1e7}) {
        const double eps_i = 0.05, delta_i = 0.1;
        const auto want = budget_plugin_real(n, eps_i, delta_i, 1.0) <=
                                  budget_collision_real(n, eps_i, delta_i, 1.0)
                              ? L1Strategy::Plugin
                              : L1Strategy::Collision;
        CHECK(choose_l1_subroutine(4, n, eps_i, delta_i, 1.0) == want);
    }
}

TEST_CASE("degenerate eps accepts unconditionally with zero draws") {
    auto d = five_point();
    SampleSource sp(d, 1), sq(d, 2);
    EmdTestConfig cfg{1, 1.0, 2.0, L1Strategy::Auto, 1.0};  // eps = 2*span*dim
    const TestVerdict v = emd_closeness_test(sp, sq, cfg);
    CHECK(v.accepted());
    CHECK(v.samples_p == 0);
    CHECK(v.samples_q == 0);
    CHECK(sp.draws_taken() == 0);
}

TEST_CASE("deep hierarchies are rejected") {
    Rng gen(1);
    auto p = testsupport::random_distribution(gen, 8, 1.0, 3);
    SampleSource sp(p, 1), sq(p, 2);
    EmdTestConfig cfg{8, 1.0, 0.05, L1Strategy::Collision, 1e-30};
    CHECK_THROWS_AS(emd_closeness_test(sp, sq, cfg), ConfigError);
}

TEST_CASE("closeness tester: completeness at d=1") {
    auto d = five_point();
    EmdTestConfig cfg{1, 1.0, 0.25, L1Strategy::Auto, 0.003};
    int accepts = 0;
    for (int t = 0; t < 200; ++t) {
        SampleSource sp(d, 1 + 2 * static_cast<std::uint64_t>(t));
        SampleSource sq(d, 2 + 2 * static_cast<std::uint64_t>(t));
        accepts += emd_closeness_test(sp, sq, cfg).accepted();
    }
    CHECK(accepts >= 134);
}

TEST_CASE("closeness tester: soundness on the hard pair") {
    auto [p, q] = gen_hard_pair_1d(1.0, 0.2);
    CHECK(emd_exact(p, q) == doctest::Approx(0.2).epsilon(1e-12));
    EmdTestConfig cfg{1, 1.0, 0.1, L1Strategy::Auto, 3e-5};
    int rejects = 0;
    for (int t = 0; t < 200; ++t) {
        SampleSource sp(p, 1 + 2 * static_cast<std::uint64_t>(t));
        SampleSource sq(q, 2 + 2 * static_cast<std::uint64_t>(t));
        rejects += !emd_closeness_test(sp, sq, cfg).accepted();
    }
    CHECK(rejects >= 134);
}

TEST_CASE("closeness tester: budget determinism and rejection monotonicity") {
    Rng rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        const double eps = 0.15 + 0.2 * rng.next_unit();
        const double c = 0.001 * (1.0 + rng.next_unit());
        EmdTestConfig cfg{1, 1.0, eps, L1Strategy::Auto, c};
        auto p = testsupport::random_distribution(rng, 1, 1.0, 5);
        auto q = testsupport::random_distribution(rng, 1, 1.0, 5);
        SampleSource sp(p, 10 + rep), sq(q, 20 + rep);
        std::vector<LevelOutcome> levels;
        const TestVerdict v = emd_closeness_test(sp, sq, cfg, &levels);

        // closed-form budget: sum of per-level plugin budgets (d=1 -> plugin)
        std::uint64_t expected = 0;
        const int L = emd_test_levels(cfg);
        REQUIRE(static_cast<int>(levels.size()) == L);
        for (int i = 1; i <= L; ++i) {
            expected += budget_plugin(level_domain_size(i, 1), emd_test_level_eps(cfg, i),
                                      emd_test_level_delta(cfg), c);
        }
        CHECK(v.samples_p == expected);
        CHECK(v.samples_q == expected);
        CHECK(v.samples_p == sp.draws_taken());

        bool any_reject = false;
        for (const auto& lv : levels) {
            if (lv.decision == Decision::Reject) any_reject = true;
        }
        CHECK((v.decision == Decision::Reject) == any_reject);
    }
}

TEST_CASE("known-distribution tester") {
    auto d = five_point();
    SUBCASE("q side needs no draws") {
        SampleSource sp(d, 5);
        EmdTestConfig cfg{1, 1.0, 0.25, L1Strategy::Auto, 1.0};
        std::vector<LevelOutcome> levels;
        const TestVerdict v = emd_closeness_test_known(d, sp, cfg, &levels);
        CHECK(v.samples_q == 0);
        for (const auto& lv : levels) {
            CHECK(lv.used == SubroutineKind::Known);
            CHECK(lv.samples_q == 0);
        }
        std::uint64_t expected = 0;
        for (int i = 1; i <= emd_test_levels(cfg); ++i) {
            expected += budget_known(level_domain_size(i, 1), emd_test_level_eps(cfg, i),
                                     emd_test_level_delta(cfg), 1.0);
        }
        CHECK(v.samples_p == expected);
    }
    SUBCASE("completeness battery") {
        EmdTestConfig cfg{1, 1.0, 0.25, L1Strategy::Auto, 10.0};
        int accepts = 0;
        for (int t = 0; t < 200; ++t) {
            SampleSource sp(d, 1 + 2 * static_cast<std::uint64_t>(t));
            accepts += emd_closeness_test_known(d, sp, cfg).accepted();
        }
        CHECK(accepts >= 134);
    }
    SUBCASE("soundness battery") {
        auto [p, q] = gen_hard_pair_1d(1.0, 0.2);
        EmdTestConfig cfg{1, 1.0, 0.1, L1Strategy::Auto, 0.3};
        int rejects = 0;
        for (int t = 0; t < 200; ++t) {
            SampleSource sp(p, 1 + 2 * static_cast<std::uint64_t>(t));
            rejects += !emd_closeness_test_known(q, sp, cfg).accepted();
        }
        CHECK(rejects >= 134);
    }
}

TEST_CASE("estimator grid") {
    CHECK(approx_grid_center(Point{0.31}, 1, 1.0, 0.05) == Point{0.325});
    // last cell truncated: span lands inside
    const Point snapped = approx_grid_center(Point{0.999}, 1, 1.0, 0.3);
    CHECK(snapped.coords[0] <= 1.0);
    // grid side at d=2, eps=0.4 is 0.05
    auto d2 = new_distribution({{Point{0.025, 0.025}, 1.0}}, 2, 1.0);
    SampleSource sp(d2, 1), sq(d2, 2);
    EmdTestConfig cfg{2, 1.0, 0.4, L1Strategy::Auto, 0.01};
    const EstimateReport r = emd_estimate(sp, sq, cfg);
    CHECK(r.grid_side == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("estimator: exact zero on a point mass at a cell center") {
    // cell centers for side 0.05 are 0.025 + k*0.05
    auto mass = new_distribution({{Point{0.275}, 1.0}}, 1, 1.0);
    SampleSource sp(mass, 3), sq(mass, 4);
    EmdTestConfig cfg{1, 1.0, 0.2, L1Strategy::Auto, 1.0};
    const EstimateReport r = emd_estimate(sp, sq, cfg);
    CHECK(r.estimate == 0.0);
    CHECK(r.samples_p == 8000);  // (4*1*1/0.2)^3
    CHECK(r.samples_p == budget_emd_approx(1, 1.0, 0.2, 1.0));
    CHECK(r.seed_p == 3);
    CHECK(r.seed_q == 4);
}

TEST_CASE("estimator: additive error battery on the hard pair") {
    auto [p, q] = gen_hard_pair_1d(1.0, 0.1);
    CHECK(emd_exact(p, q) == doctest::Approx(0.1).epsilon(1e-12));
    EmdTestConfig cfg{1, 1.0, 0.2, L1Strategy::Auto, 1.0};
    int ok = 0;
    for (int t = 0; t < 50; ++t) {
        SampleSource sp(p, 1 + 2 * static_cast<std::uint64_t>(t));
        SampleSource sq(q, 2 + 2 * static_cast<std::uint64_t>(t));
        const EstimateReport r = emd_estimate(sp, sq, cfg);
        if (std::abs(r.estimate - 0.1) <= 0.2) ++ok;
    }
    CHECK(ok >= 33);  // 2/3 of 50
}

TEST_CASE("estimator outputs are EMDs, so they satisfy the metric axioms") {
    // Re-running a source with the same seed reproduces the same snapped
    // empirical, so pairwise estimates among three distributions are exact
    // EMDs between three fixed empiricals.
    auto p = five_point();
    auto [q, r] = gen_hard_pair_1d(1.0, 0.2);
    EmdTestConfig cfg{1, 1.0, 0.25, L1Strategy::Auto, 1.0};
    auto estimate = [&](const DiscreteDistribution& a, std::uint64_t sa,
                        const DiscreteDistribution& b, std::uint64_t sb) {
        SampleSource src_a(a, sa), src_b(b, sb);
        return emd_estimate(src_a, src_b, cfg).estimate;
    };
    const double pq = estimate(p, 11, q, 12);
    const double qr = estimate(q, 12, r, 13);
    const double pr = estimate(p, 11, r, 13);
    CHECK(pr <= pq + qr + 1e-9);
    CHECK(pq <= pr + qr + 1e-9);
    CHECK(pq >= 0.0);
    // symmetry, bitwise by canonical solver ordering
    CHECK(pq == estimate(q, 12, p, 11));
}

TEST_CASE("closeness tester rejects mismatched domains") {
    auto p = five_point();
    auto other = new_distribution({{Point{0.5, 0.5}, 1.0}}, 2, 1.0);
    SampleSource sp(p, 1), sq(other, 2);
    EmdTestConfig cfg{1, 1.0, 0.25, L1Strategy::Auto, 0.01};
    CHECK_THROWS_AS(emd_closeness_test(sp, sq, cfg), DomainMismatch);
    CHECK_THROWS_AS(emd_closeness_test_known(other, sp, cfg), DomainMismatch);
}

TEST_CASE("estimator rejects an empty grid") {
    auto d = five_point();
    SampleSource sp(d, 1), sq(d, 2);
    EmdTestConfig cfg{1, 1.0, 5.0, L1Strategy::Auto, 1.0};
    CHECK_THROWS_AS(emd_estimate(sp, sq, cfg), ConfigError);
}
