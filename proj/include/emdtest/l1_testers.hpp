#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "emdtest/distribution.hpp"

namespace emdtest {

/// Sparse distribution over an integer-keyed domain {0, ..., n-1} (grid
/// cell keys, cluster-center indices). Sorted by key.
struct IndexedDist {
    std::vector<std::pair<std::int64_t, double>> mass;

    static IndexedDist from_pairs(std::vector<std::pair<std::int64_t, double>> pairs);

    double mass_of(std::int64_t key) const;
    double total() const;
    double l2_norm_sq() const;
};

double l1_distance(const IndexedDist& a, const IndexedDist& b);

/// Budget-accounted stream of i.i.d. integer keys.
class IndexSource {
public:
    virtual ~IndexSource() = default;
    virtual std::int64_t draw() = 0;
};

/// Synthetic indexed source: seeded draws from an explicit IndexedDist.
class SyntheticIndexSource final : public IndexSource {
public:
    SyntheticIndexSource(IndexedDist dist, std::uint64_t seed);
    std::int64_t draw() override;
    std::uint64_t draws_taken() const { return draws_; }

private:
    IndexedDist dist_;
    std::vector<double> cumulative_;
    Rng rng_;
    std::uint64_t draws_ = 0;
};

/// Adapter mapping a geometric SampleSource through a point-to-key
/// function (grid cell, nearest center). Draw accounting happens in the
/// wrapped source.
class MappedIndexSource final : public IndexSource {
public:
    MappedIndexSource(SampleSource& src, std::function<std::int64_t(const Point&)> map)
        : src_(src), map_(std::move(map)) {}
    std::int64_t draw() override { return map_(src_.draw()); }

private:
    SampleSource& src_;
    std::function<std::int64_t(const Point&)> map_;
};

/// Parameters shared by the l1 closeness testers. n is the domain size
/// (it enters the budget formulas and the l2 thresholds; occupied keys
/// may be far fewer). c is the explicit budget multiplier: the classical
/// sample-complexity bounds hide their constants, so c keeps the actual
/// budgets honest and reproducible.
struct L1TesterConfig {
    double n = 1;
    double eps = 0.5;
    double delta = 1.0 / 3.0;
    double c = 1.0;
};

// --- Budget formulas ------------------------------------------------------
//
// All logs are base 2, clamped below at 1 so budgets never vanish:
//   L(x) = max(log2(x), 1).
// The *_real forms are used for strategy comparisons; the unsigned forms
// are the exact per-source draw counts and throw ConfigError when the
// value is too large to actually draw.

double log2_clamped(double x);

double budget_collision_real(double n, double eps, double delta, double c);
double budget_estimate_real(double n, double eps, double delta, double t, double c);
double budget_plugin_real(double n, double eps, double delta, double c);
double budget_known_real(double n, double eps, double delta, double c);

std::uint64_t budget_collision(double n, double eps, double delta, double c);
std::uint64_t budget_estimate(double n, double eps, double delta, double t, double c);
std::uint64_t budget_plugin(double n, double eps, double delta, double c);
std::uint64_t budget_known(double n, double eps, double delta, double c);

// --- Testers ---------------------------------------------------------------

/// Empirical estimate of the source's distribution from
/// budget_estimate(n, eps, delta, t, c) draws. With probability >= 1-delta
/// every element at or above the floor t satisfies the two-sided
/// multiplicative bound
///   (1-eps) p(i) <= est(i) <= (1+eps) p(i),
/// and every element below the floor stays under (1+eps) t. (A raw
/// empirical estimate cannot exceed zero for zero-mass elements, so the
/// below-floor lower bound is vacuous here.)
IndexedDist l1_estimate(IndexSource& src, double n, double eps, double delta, double t,
                        double c = 1.0);

/// Sublinear closeness tester (n^{2/3} regime): heavy elements (mass >=
/// eps / (4 n^{2/3})) are compared via empirical estimates; the light
/// remainder goes through an unbiased collision-based l2 statistic.
/// Accepts p == q and rejects ||p-q||_1 > eps, each with probability
/// >= 1-delta at calibrated c. Consumes exactly budget_collision(...)
/// draws per source.
TestVerdict l1_test_collision(IndexSource& src_p, IndexSource& src_q,
                              const L1TesterConfig& cfg);

/// Plug-in tester: estimates both distributions with l1_estimate
/// (floor t = eps/(4n), estimate error eps/8, failure delta/2 per side)
/// and thresholds their l1 distance at eps/2. Consumes exactly
/// budget_plugin(...) draws per source.
TestVerdict l1_test_plugin(IndexSource& src_p, IndexSource& src_q,
                           const L1TesterConfig& cfg);

/// Identity tester against an explicitly known distribution (sqrt(n)
/// regime): unbiased estimator of ||p - q||_2^2 thresholded at
/// eps^2 / (2n). Consumes exactly budget_known(...) draws from p and none
/// from q.
TestVerdict l1_test_known(const IndexedDist& q_known, IndexSource& src_p,
                          const L1TesterConfig& cfg);

/// Decision rule of the plug-in tester, exposed for direct testing:
/// accept iff the estimated distance is <= eps/2 (ties accept).
Decision plugin_decision(double estimated_l1, double eps);

}  // namespace emdtest
