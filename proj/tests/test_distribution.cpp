#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "emdtest/distribution.hpp"
#include "support/instances.hpp"

using namespace emdtest;

namespace {
constexpr std::uint64_t kSeed = 1;
}

TEST_CASE("constructor validates and normalizes") {
    // endpoint pair at span 1
    auto pair = new_distribution({{Point{0.0}, 0.5}, {Point{1.0}, 0.5}}, 1, 1.0);
    CHECK(pair.support_size() == 2);
    CHECK(pair.weight(0) == 0.5);

    auto mass = new_distribution({{Point{0.0}, 1.0}}, 1, 1.0);
    CHECK(mass.support_size() == 1);

    SUBCASE("duplicates merge") {
        auto merged = new_distribution({{Point{0.0}, 0.5}, {Point{0.0}, 0.5}}, 1, 1.0);
        CHECK(merged.support_size() == 1);
        CHECK(merged.weight(0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("bad mass rejected") {
        CHECK_THROWS_AS(new_distribution({{Point{0.0}, 0.6}, {Point{1.0}, 0.5}}, 1, 1.0),
                        NormalizationError);
        CHECK_THROWS_AS(new_distribution({{Point{0.0}, -0.5}, {Point{1.0}, 1.5}}, 1, 1.0),
                        NormalizationError);
    }
    SUBCASE("out-of-domain coordinates rejected") {
        CHECK_THROWS_AS(new_distribution({{Point{1.5}, 1.0}}, 1, 1.0), DomainError);
        CHECK_THROWS_AS(new_distribution({{Point{-0.1}, 1.0}}, 1, 1.0), DomainError);
    }
    SUBCASE("support is sorted and distinct") {
        auto d = new_distribution(
            {{Point{0.9}, 0.25}, {Point{0.1}, 0.25}, {Point{0.5}, 0.5}}, 1, 1.0);
        CHECK(d.point(0) < d.point(1));
        CHECK(d.point(1) < d.point(2));
    }
}

TEST_CASE("draw: counter and determinism contracts") {
    auto mass = new_distribution({{Point{0.0}, 1.0}}, 1, 1.0);
    SampleSource src(mass, kSeed);
    for (int i = 0; i < 100; ++i) CHECK(src.draw() == Point{0.0});
    CHECK(src.draws_taken() == 100);

    SUBCASE("same seed, same stream") {
        Rng gen(7);
        auto d = testsupport::random_distribution(gen, 2, 1.0, 6);
        SampleSource a(d, 42), b(d, 42);
        for (int i = 0; i < 500; ++i) CHECK(a.draw() == b.draw());
    }
    SUBCASE("hard budget") {
        SampleSource limited(mass, kSeed);
        limited.set_budget(3);
        limited.draw();
        limited.draw();
        limited.draw();
        CHECK_THROWS_AS(limited.draw(), BudgetExceeded);
    }
    SUBCASE("external stream replays in order") {
        auto src2 = SampleSource::from_points({Point{0.25}, Point{0.75}}, Domain{1, 1.0});
        CHECK(src2.draw() == Point{0.25});
        CHECK(src2.draw() == Point{0.75});
        CHECK_THROWS_AS(src2.draw(), BudgetExceeded);
    }
}

TEST_CASE("draw: fair endpoint pair frequency at the default seed") {
    auto pair = new_distribution({{Point{0.0}, 0.5}, {Point{1.0}, 0.5}}, 1, 1.0);
    SampleSource src(pair, kSeed);
    int zeros = 0;
    for (int i = 0; i < 100000; ++i) {
        if (src.draw() == Point{0.0}) ++zeros;
    }
    const double freq = zeros / 100000.0;
    CHECK(freq >= 0.49);
    CHECK(freq <= 0.51);
    // Seed-specific regression constant (mt19937_64, seed 1).
    CHECK(zeros == 49910);
}

TEST_CASE("empirical distributions") {
    const Point a{0.0}, b{1.0};
    auto half = empirical({a, a, b, b}, 1, 1.0);
    CHECK(half.support_size() == 2);
    CHECK(half.weight(0) == 0.5);
    CHECK(half.weight(1) == 0.5);

    auto single = empirical({a}, 1, 1.0);
    CHECK(single.weight(0) == 1.0);

    CHECK_THROWS_AS(empirical({}, 1, 1.0), EmptyInput);

    SUBCASE("biased pair empirical weight at the default seed") {
        auto biased = new_distribution({{Point{0.0}, 0.9}, {Point{1.0}, 0.1}}, 1, 1.0);
        SampleSource src(biased, kSeed);
        std::vector<Point> draws;
        for (int i = 0; i < 1000; ++i) draws.push_back(src.draw());
        auto emp = empirical(draws, 1, 1.0);
        const double w0 = emp.mass_at(Point{0.0});
        CHECK(w0 >= 0.87);
        CHECK(w0 <= 0.93);
        // Seed-specific regression constant: 900 of the 1000 draws land on 0.
        CHECK(w0 == doctest::Approx(0.9).epsilon(1e-12));
    }
}

TEST_CASE("l1_distance basics") {
    auto p = new_distribution({{Point{0.0}, 0.5}, {Point{1.0}, 0.5}}, 1, 1.0);
    CHECK(l1_distance(p, p) == 0.0);

    auto disjoint = new_distribution({{Point{0.25}, 0.5}, {Point{0.75}, 0.5}}, 1, 1.0);
    CHECK(l1_distance(p, disjoint) == doctest::Approx(2.0));

    // biased endpoint pair: distance 2 eps / span
    const double eps = 0.1, span = 1.0;
    auto q = new_distribution(
        {{Point{0.0}, 0.5 + eps / span}, {Point{span}, 0.5 - eps / span}}, 1, span);
    CHECK(l1_distance(p, q) == doctest::Approx(2.0 * eps / span).epsilon(1e-12));

    auto other_domain = new_distribution({{Point{0.0}, 1.0}}, 1, 2.0);
    CHECK_THROWS_AS(l1_distance(p, other_domain), DomainMismatch);
}

TEST_CASE("l1 is a metric on random triples") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const int dim = 1 + static_cast<int>(rng.next_below(3));
        auto p = testsupport::random_distribution(rng, dim, 2.0, 6);
        auto q = testsupport::random_distribution(rng, dim, 2.0, 6);
        auto r = testsupport::random_distribution(rng, dim, 2.0, 6);
        CHECK(l1_distance(p, q) == doctest::Approx(l1_distance(q, p)).epsilon(1e-12));
        CHECK(l1_distance(p, r) <= l1_distance(p, q) + l1_distance(q, r) + 1e-9);
        CHECK(l1_distance(p, q) >= 0.0);
        CHECK(l1_distance(p, q) <= 2.0 + 1e-12);
    }
}
