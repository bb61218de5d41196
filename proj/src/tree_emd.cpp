#include "emdtest/tree_emd.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace emdtest {

WeightedTree::WeightedTree(int n, std::vector<TreeEdge> edges)
    : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw ParamError("tree needs at least one node");
    if (edges_.size() != static_cast<std::size_t>(n_ - 1)) {
        throw ParamError("a tree on n nodes has exactly n-1 edges");
    }
    std::vector<std::vector<std::pair<int, std::size_t>>> adj(static_cast<std::size_t>(n_));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& [u, v, w] = edges_[e];
        if (u < 0 || u >= n_ || v < 0 || v >= n_ || u == v) {
            throw ParamError("edge endpoints out of range");
        }
        if (!(w > 0.0)) throw ParamError("edge weights must be positive");
        adj[static_cast<std::size_t>(u)].emplace_back(v, e);
        adj[static_cast<std::size_t>(v)].emplace_back(u, e);
        max_weight_ = std::max(max_weight_, w);
    }

    parent_.assign(static_cast<std::size_t>(n_), -1);
    edge_child_.assign(edges_.size(), -1);
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    bfs_order_.reserve(static_cast<std::size_t>(n_));
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        bfs_order_.push_back(u);
        for (const auto& [v, e] : adj[static_cast<std::size_t>(u)]) {
            if (seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = 1;
            parent_[static_cast<std::size_t>(v)] = u;
            edge_child_[e] = v;
            frontier.push(v);
        }
    }
    if (bfs_order_.size() != static_cast<std::size_t>(n_)) {
        throw ParamError("edge list does not form a connected tree");
    }
}

std::vector<std::vector<double>> WeightedTree::distance_matrix() const {
    const auto n = static_cast<std::size_t>(n_);
    // depth-from-root distances, then dist(u,v) via BFS per node (desk scale)
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& [u, v, w] : edges_) {
        adj[static_cast<std::size_t>(u)].emplace_back(v, w);
        adj[static_cast<std::size_t>(v)].emplace_back(u, w);
    }
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<char> seen(n, 0);
        std::queue<int> frontier;
        frontier.push(static_cast<int>(s));
        seen[s] = 1;
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
                if (seen[static_cast<std::size_t>(v)]) continue;
                seen[static_cast<std::size_t>(v)] = 1;
                dist[s][static_cast<std::size_t>(v)] =
                    dist[s][static_cast<std::size_t>(u)] + w;
                frontier.push(v);
            }
        }
    }
    return dist;
}

Domain WeightedTree::node_domain() const {
    return Domain{1, static_cast<double>(std::max(n_ - 1, 1))};
}

int WeightedTree::node_of(const Point& p) const {
    if (p.dim() != 1) throw SupportError("tree distributions are 1-d node ids");
    const double c = p.coords[0];
    const double rounded = std::round(c);
    if (std::abs(c - rounded) > 1e-9 || rounded < 0.0 || rounded >= n_) {
        throw SupportError("support point is not a tree node");
    }
    return static_cast<int>(rounded);
}

DiscreteDistribution node_distribution(const WeightedTree& tree,
                                       const std::vector<double>& node_weights) {
    if (node_weights.size() != static_cast<std::size_t>(tree.node_count())) {
        throw ParamError("node weight vector size mismatch");
    }
    std::vector<std::pair<Point, double>> pw;
    for (std::size_t v = 0; v < node_weights.size(); ++v) {
        if (node_weights[v] > 0.0) {
            pw.emplace_back(Point{static_cast<double>(v)}, node_weights[v]);
        }
    }
    return DiscreteDistribution(std::move(pw), tree.node_domain());
}

std::vector<double> subtree_masses(const WeightedTree& tree,
                                   const DiscreteDistribution& dist) {
    const auto n = static_cast<std::size_t>(tree.node_count());
    std::vector<double> node_mass(n, 0.0);
    for (std::size_t i = 0; i < dist.support_size(); ++i) {
        node_mass[static_cast<std::size_t>(tree.node_of(dist.point(i)))] += dist.weight(i);
    }
    // Accumulate up the tree in reverse BFS order.
    std::vector<double> subtree = node_mass;
    for (auto it = tree.bfs_order_.rbegin(); it != tree.bfs_order_.rend(); ++it) {
        const int v = *it;
        const int par = tree.parent_[static_cast<std::size_t>(v)];
        if (par >= 0) subtree[static_cast<std::size_t>(par)] += subtree[static_cast<std::size_t>(v)];
    }
    std::vector<double> out(tree.edges().size(), 0.0);
    for (std::size_t e = 0; e < tree.edges().size(); ++e) {
        out[e] = subtree[static_cast<std::size_t>(tree.child_of_edge(e))];
    }
    return out;
}

double tree_emd_exact(const WeightedTree& tree, const DiscreteDistribution& p,
                      const DiscreteDistribution& q) {
    const auto pm = subtree_masses(tree, p);
    const auto qm = subtree_masses(tree, q);
    double sum = 0.0;
    for (std::size_t e = 0; e < tree.edges().size(); ++e) {
        sum += tree.edges()[e].w * std::abs(pm[e] - qm[e]);
    }
    return sum;
}

std::uint64_t budget_tree_estimate(const WeightedTree& tree, double eps, double delta,
                                   double c) {
    if (!(eps > 0.0)) throw ParamError("eps must be positive");
    if (!(delta > 0.0) || !(delta < 1.0)) throw ParamError("delta must be in (0, 1)");
    if (!(c > 0.0)) throw ParamError("budget multiplier must be positive");
    const double n = tree.node_count();
    const double ratio = tree.max_weight() * n / eps;
    const double value = std::ceil(c * ratio * ratio * log2_clamped(n / delta));
    if (value > 1e15) throw ConfigError("tree estimator budget too large");
    return static_cast<std::uint64_t>(value);
}

EstimateReport tree_emd_estimate(SampleSource& src_p, SampleSource& src_q,
                                 const WeightedTree& tree, double eps, double delta,
                                 double c) {
    const std::uint64_t budget = budget_tree_estimate(tree, eps, delta, c);

    auto empirical_nodes = [&](SampleSource& src) {
        std::vector<Point> draws;
        draws.reserve(budget);
        for (std::uint64_t s = 0; s < budget; ++s) draws.push_back(src.draw());
        return empirical(draws, 1, tree.node_domain().span);
    };
    const DiscreteDistribution p_hat = empirical_nodes(src_p);
    const DiscreteDistribution q_hat = empirical_nodes(src_q);

    EstimateReport report;
    report.estimate = tree_emd_exact(tree, p_hat, q_hat);
    report.eps = eps;
    report.delta = delta;
    report.samples_p = budget;
    report.samples_q = budget;
    report.grid_side = 0.0;  // no grid in the tree estimator
    report.seed_p = src_p.seed();
    report.seed_q = src_q.seed();
    return report;
}

WeightedTree line_tree(int n) {
    std::vector<TreeEdge> edges;
    edges.reserve(static_cast<std::size_t>(std::max(n - 1, 0)));
    for (int v = 1; v < n; ++v) edges.push_back({v - 1, v, 1.0});
    return WeightedTree(n, std::move(edges));
}

std::pair<DiscreteDistribution, DiscreteDistribution> hard_line_instance(int n, double eps) {
    if (n < 2) throw ParamError("hard line instance needs n >= 2");
    if (!(eps >= 0.0)) throw ParamError("eps must be nonnegative");
    const double h = eps / (2.0 * (n - 1));
    if (h > 0.5) throw ParamError("eps too large: endpoint mass would go negative");
    const WeightedTree tree = line_tree(n);

    // h == 1/2 degenerates to opposite point masses; node_distribution
    // drops the zero-weight endpoint.
    std::vector<double> pw(static_cast<std::size_t>(n), 0.0);
    std::vector<double> qw(static_cast<std::size_t>(n), 0.0);
    pw.front() = 0.5 + h;
    pw.back() = 0.5 - h;
    qw.front() = 0.5 - h;
    qw.back() = 0.5 + h;
    return {node_distribution(tree, pw), node_distribution(tree, qw)};
}

}  // namespace emdtest
