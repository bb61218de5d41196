#pragma once

#include <cstdint>
#include <vector>

#include "emdtest/distribution.hpp"

namespace emdtest {

/// Index of one cell of the level-i grid (side span/2^i). Cell coordinate
/// k along an axis covers the half-open slab [k*side, (k+1)*side), except
/// the top cell, which is closed at span.
struct CellIndex {
    int level = 1;
    std::vector<std::int64_t> cell;

    auto operator<=>(const CellIndex&) const = default;
};

/// The distribution a point distribution induces on the level-i grid
/// cells. Stored sparsely (occupied cells only), keyed by the linearized
/// cell index, sorted by key; mass is preserved exactly.
struct CoarseningLevel {
    int level = 1;
    std::vector<std::pair<std::int64_t, double>> cells;

    double mass_of(std::int64_t key) const;
    double total_mass() const;
};

/// Grid cell containing a point. Deterministic: half-open slabs with the
/// top cell closed at span.
CellIndex cell_of(const Point& p, int level, int dim, double span);

/// Linearized cell key (base-2^level positional encoding). Requires
/// dim * level <= 62; throws ConfigError beyond that.
std::int64_t cell_key(const CellIndex& idx, int dim);
CellIndex cell_from_key(std::int64_t key, int level, int dim);

/// Number of cells 2^(dim*level) as a double (formula use only).
double level_domain_size(int level, int dim);

/// The i-coarsening of a distribution.
CoarseningLevel coarsen(const DiscreteDistribution& p, int level);

/// l1 distance between two coarsenings of the same level.
double l1_distance(const CoarseningLevel& a, const CoarseningLevel& b);

/// Number of coarsening levels used by the grid-hierarchy bound and the
/// closeness tester: ceil(log2(2 * span * dim / eps)), never negative.
int coarsening_levels(int dim, double span, double eps);

/// Evaluates the grid-hierarchy upper bound
///   dim * sum_{i=1..L} (span / 2^(i-1)) * ||p^(i) - q^(i)||_1 + eps/2,
/// which dominates the exact EMD.
double coarsening_bound(const DiscreteDistribution& p, const DiscreteDistribution& q,
                        double eps);

}  // namespace emdtest
