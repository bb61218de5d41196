#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "emdtest/distribution.hpp"

namespace emdtest {

/// Supply-demand bipartite instance: supplies p over the row points,
/// demands q over the column points, cost(i, j) = distance between row
/// point i and column point j. Supplies and demands each sum to 1 within
/// 1e-12; costs are nonnegative and metric (triangle inequality).
struct FlowNetwork {
    std::vector<double> supplies;
    std::vector<double> demands;
    std::vector<std::vector<double>> costs;  // supplies.size() x demands.size()

    std::size_t rows() const { return supplies.size(); }
    std::size_t cols() const { return demands.size(); }

    /// Basic shape/mass validation. Throws DomainMismatch on violation.
    void validate() const;
};

/// A satisfying flow: row sums equal the supplies and column sums equal
/// the demands within 1e-9, cost = sum of flow * edge cost.
struct FlowResult {
    std::vector<std::vector<double>> flow;
    double cost = 0.0;

    /// Mass carried on edges with cost > tol.
    double nonzero_cost_mass(const FlowNetwork& net, double tol = 0.0) const;
    /// Largest row/column mass-balance violation.
    double feasibility_residual(const FlowNetwork& net) const;
};

/// Builds the l1-metric network of Def. supply side = support of p,
/// demand side = support of q.
FlowNetwork make_l1_network(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Builds a network from an explicit distance matrix over a common
/// indexed domain (dist[i][j] = distance between elements i and j).
/// p and q are dense weight vectors over that domain; zero-weight
/// entries are kept so indices line up with the matrix.
FlowNetwork make_matrix_network(const std::vector<std::vector<double>>& dist,
                                const std::vector<double>& p,
                                const std::vector<double>& q);

/// Minimum cost of a satisfying flow, computed by successive shortest
/// paths with node potentials. Pure function, thread-safe.
double min_cost_flow_value(const FlowNetwork& net);

/// Full optimal flow for the network. No zero-edge post-processing here.
FlowResult solve_min_cost_flow(const FlowNetwork& net);

/// Exact EMD between p and q under the ambient l1 metric.
/// Symmetric bit-for-bit: the argument pair is canonicalized before
/// solving, so emd_exact(p, q) == emd_exact(q, p) exactly.
double emd_exact(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Exact EMD over an explicit distance matrix (used by the tree metric
/// cross-checks and the matrix instance file format).
double emd_exact_matrix(const std::vector<std::vector<double>>& dist,
                        const std::vector<double>& p,
                        const std::vector<double>& q);

/// Optimal flow for (p, q) under l1, post-processed so every zero-cost
/// edge (x, x) carries min{p(x), q(x)}. After the pass the mass on
/// non-zero-cost edges is exactly ||p-q||_1 / 2 (up to float noise).
FlowResult optimal_flow(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Matrix-metric variant of optimal_flow. The saturation pass applies to
/// the diagonal, which requires dist[i][i] == 0.
FlowResult optimal_flow_matrix(const std::vector<std::vector<double>>& dist,
                               const std::vector<double>& p,
                               const std::vector<double>& q);

/// The l1 sandwich: (||p-q||_1/2 * min_dist, ||p-q||_1/2 * diameter).
/// min_dist is the minimum pairwise distance among distinct support
/// points, diameter the maximum over the combined support. Guarantees
/// lower <= emd_exact(p, q) <= upper.
std::pair<double, double> emd_bounds(const DiscreteDistribution& p,
                                     const DiscreteDistribution& q,
                                     double min_dist, double diameter);

/// Convenience overload that computes min_dist and diameter from the
/// combined support (O(s^2) pairs).
std::pair<double, double> emd_bounds(const DiscreteDistribution& p,
                                     const DiscreteDistribution& q);

/// Snapping map onto the level-ceil(log2(4*dim*span/eps)) grid, whose
/// cells have l1 radius <= eps/8. Snapping a distribution (or a sample
/// stream) through it perturbs EMD by at most eps/2, which is how
/// continuous-domain inputs reduce to the finite case.
class EpsilonNet {
public:
    EpsilonNet(int dim, double span, double eps);

    int level() const { return level_; }
    double cell_side() const { return cell_side_; }
    /// Documented worst-case EMD perturbation of snapping: eps/2.
    double perturbation_bound() const { return eps_ / 2.0; }

    Point snap(const Point& p) const;
    DiscreteDistribution snap(const DiscreteDistribution& dist) const;

private:
    int dim_;
    double span_;
    double eps_;
    int level_;
    double cell_side_;
};

}  // namespace emdtest
