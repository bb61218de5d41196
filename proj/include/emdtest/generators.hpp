#pragma once

#include <utility>
#include <vector>

#include "emdtest/distribution.hpp"

namespace emdtest {

/// Endpoint-biased pair on {0, span}: p puts 1/2 at each endpoint, q puts
/// 1/2 + eps/span at 0 and 1/2 - eps/span at span, so EMD(p, q) = eps
/// exactly. The one-dimensional hard instance. Requires 0 <= eps <= span/2.
std::pair<DiscreteDistribution, DiscreteDistribution> gen_hard_pair_1d(double span,
                                                                       double eps);

/// Injects two abstract distributions over {0..n-1} into the lattice
/// points of the grid with pitch span * n^(-1/dim). Preserves l1 distance
/// and forces EMD(P, Q) >= (||p-q||_1 / 2) * pitch (minimum lattice
/// spacing), the grid reduction behind the high-dimensional hard
/// instances. The injection enumerates lattice points in row-major order.
std::pair<DiscreteDistribution, DiscreteDistribution> gen_grid_injection(
    const std::vector<double>& p_abstract, const std::vector<double>& q_abstract,
    std::size_t n, int dim, double span);

/// The lattice pitch span * n^(-1/dim) used by gen_grid_injection.
double grid_injection_pitch(std::size_t n, int dim, double span);

struct ClusteredPair {
    DiscreteDistribution p;
    DiscreteDistribution q;
    std::vector<Point> centers;
};

/// Planted (k, b)-clusterable pair: k centers pairwise more than 4b
/// apart, three points within l1 radius b/2 of each center, equal
/// per-cluster mass in p; q shifts `imbalance` mass from cluster 0 to
/// cluster 1 (0 <= imbalance <= 1/k). k <= 2 uses antipodal corners so
/// the cross-cluster distance is dim * span.
ClusteredPair gen_clustered(std::size_t k, double b, int dim, double span,
                            double imbalance);

/// Deterministic center layout used by gen_clustered (exposed for the
/// known-centers tester batteries).
std::vector<Point> clustered_centers(std::size_t k, double b, int dim, double span);

}  // namespace emdtest
