#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emdtest/errors.hpp"
#include "emdtest/rng.hpp"

namespace emdtest {

/// A point of the ambient space [0, span]^dim under the l1 metric.
struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c) : coords(std::move(c)) {}
    Point(std::initializer_list<double> c) : coords(c) {}

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t j) const { return coords[j]; }

    auto operator<=>(const Point&) const = default;
};

double l1_norm_distance(const Point& a, const Point& b);

/// Describes the ambient space: dimension and coordinate span (Delta).
struct Domain {
    int dim = 1;
    double span = 1.0;

    bool operator==(const Domain&) const = default;
};

/// A finite-support probability distribution over [0, span]^dim.
///
/// Immutable after construction: the support is stored sorted by point
/// (lexicographic), duplicate points are merged at construction, weights
/// are strictly positive and sum to 1 within 1e-12.
class DiscreteDistribution {
public:
    static constexpr double kMassTolerance = 1e-12;

    /// Builds a distribution, merging duplicate points.
    /// Throws DomainError for out-of-range coordinates or bad weights,
    /// NormalizationError when the merged weights do not sum to 1.
    DiscreteDistribution(std::vector<std::pair<Point, double>> points_with_weights,
                         Domain domain);

    const Domain& domain() const { return domain_; }
    int dim() const { return domain_.dim; }
    double span() const { return domain_.span; }

    std::size_t support_size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    const Point& point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// Probability of an exact support point (0 when absent).
    double mass_at(const Point& p) const;

    bool operator==(const DiscreteDistribution&) const = default;

private:
    Domain domain_;
    std::vector<Point> points_;   // sorted, pairwise distinct
    std::vector<double> weights_; // parallel to points_, > 0, sums to 1
};

/// Builds a DiscreteDistribution; duplicate points are merged by summing
/// their weights.
DiscreteDistribution new_distribution(std::vector<std::pair<Point, double>> points_with_weights,
                                      int dim, double span);

/// Empirical distribution of a sample list: weight = multiplicity / count.
/// Throws EmptyInput for an empty list.
DiscreteDistribution empirical(const std::vector<Point>& samples, int dim, double span);

/// l1 distance sum_x |p(x) - q(x)| over the union of supports; in [0, 2].
/// Throws DomainMismatch when the domains differ.
double l1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Budget-accounted stream of i.i.d. draws.
///
/// Either synthetic (seeded draws from a DiscreteDistribution) or an
/// explicit point stream replayed in order. draws_taken() increases by
/// exactly one per draw and never resets. Single-owner: not safe to draw
/// from concurrently; parallel trials each construct their own source.
class SampleSource {
public:
    SampleSource(DiscreteDistribution dist, std::uint64_t seed);

    /// Source backed by a fixed list of points, replayed in order.
    static SampleSource from_points(std::vector<Point> stream, Domain domain);

    /// Optional hard cap; draw() throws BudgetExceeded once exhausted.
    void set_budget(std::uint64_t max_draws) { budget_ = max_draws; }

    Point draw();

    std::uint64_t draws_taken() const { return draws_taken_; }
    std::uint64_t seed() const { return seed_; }
    const Domain& domain() const { return domain_; }
    const DiscreteDistribution* distribution() const {
        return dist_ ? &*dist_ : nullptr;
    }

private:
    SampleSource(std::vector<Point> stream, Domain domain);

    Domain domain_;
    std::optional<DiscreteDistribution> dist_;
    std::vector<double> cumulative_;  // prefix sums of weights when synthetic
    std::vector<Point> stream_;       // external stream when not synthetic
    Rng rng_;
    std::uint64_t seed_ = 0;
    std::uint64_t draws_taken_ = 0;
    std::optional<std::uint64_t> budget_;
};

enum class Decision { Accept, Reject };

inline const char* to_string(Decision d) {
    return d == Decision::Accept ? "accept" : "reject";
}

/// Outcome of one tester run with the parameters it was called with and
/// the exact number of draws consumed per source.
struct TestVerdict {
    Decision decision = Decision::Accept;
    double eps = 0.0;
    double delta = 0.0;
    double span = 0.0;
    int dim = 0;
    std::uint64_t samples_p = 0;
    std::uint64_t samples_q = 0;

    std::uint64_t samples_total() const { return samples_p + samples_q; }
    bool accepted() const { return decision == Decision::Accept; }
};

}  // namespace emdtest
