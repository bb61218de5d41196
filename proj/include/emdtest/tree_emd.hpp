#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "emdtest/distribution.hpp"
#include "emdtest/emd_testers.hpp"

namespace emdtest {

struct TreeEdge {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

/// Connected weighted tree on nodes {0, ..., n-1}, rooted at node 0.
/// Rooting fixes the orientation of every edge cut: the canonical side
/// of edge e is the component of T - e not containing the root.
class WeightedTree {
public:
    WeightedTree(int n, std::vector<TreeEdge> edges);

    int node_count() const { return n_; }
    const std::vector<TreeEdge>& edges() const { return edges_; }
    double max_weight() const { return max_weight_; }

    /// Child endpoint of edge e (the endpoint on the non-root side).
    int child_of_edge(std::size_t e) const { return edge_child_[e]; }
    int parent(int v) const { return parent_[v]; }

    /// Pairwise path-distance matrix (flow-oracle cross-checks).
    std::vector<std::vector<double>> distance_matrix() const;

    /// Domain used for node-indexed distributions: dim 1, span
    /// max(n-1, 1); point coordinate = node id.
    Domain node_domain() const;

    /// Node id of a support point; throws SupportError off the node set.
    int node_of(const Point& p) const;

private:
    int n_;
    std::vector<TreeEdge> edges_;
    std::vector<int> parent_;
    std::vector<int> edge_child_;
    std::vector<int> bfs_order_;
    double max_weight_ = 0.0;

    friend std::vector<double> subtree_masses(const WeightedTree&,
                                              const DiscreteDistribution&);
};

/// Distribution on tree nodes from a dense weight vector.
DiscreteDistribution node_distribution(const WeightedTree& tree,
                                       const std::vector<double>& node_weights);

/// Mass of dist on the non-root side of every edge, in edge input order.
std::vector<double> subtree_masses(const WeightedTree& tree,
                                   const DiscreteDistribution& dist);

/// Exact tree EMD via the edge-cut formula
///   sum_e w(e) |p(T_e) - q(T_e)|,
/// which equals the min-cost flow under the tree's path metric.
double tree_emd_exact(const WeightedTree& tree, const DiscreteDistribution& p,
                      const DiscreteDistribution& q);

/// Per-source sampling budget: ceil(c * (W*n/eps)^2 * max(log2(n/delta), 1)).
std::uint64_t budget_tree_estimate(const WeightedTree& tree, double eps, double delta,
                                   double c);

/// Additive-error estimator: one shared sample batch per source estimates
/// every edge-cut mass simultaneously (each draw adds to every edge on
/// its root path), then the plug-in edge-cut sum is returned. With
/// probability >= 1-delta the estimate is within +-eps of the exact
/// value; the budget covers the worst (max-weight) edge's precision
/// target eps/(2 w(e) (n-1)).
EstimateReport tree_emd_estimate(SampleSource& src_p, SampleSource& src_q,
                                 const WeightedTree& tree, double eps, double delta,
                                 double c = 1.0);

/// Endpoint-biased pair on the n-node unit-weight path: masses
/// 1/2 +- eps/(2(n-1)) at the endpoints, perturbed in opposite
/// directions, so the tree EMD is exactly eps. The estimator's hard
/// benchmark instance.
std::pair<DiscreteDistribution, DiscreteDistribution> hard_line_instance(int n, double eps);

/// The n-node unit-weight path 0-1-...-(n-1).
WeightedTree line_tree(int n);

}  // namespace emdtest
