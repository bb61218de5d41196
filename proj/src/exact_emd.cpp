#include "emdtest/exact_emd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "emdtest/coarsening.hpp"

namespace emdtest {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kResidualTol = 1e-12;

double total(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

void FlowNetwork::validate() const {
    if (supplies.empty() || demands.empty()) {
        throw DomainMismatch("flow network needs non-empty sides");
    }
    if (costs.size() != supplies.size()) {
        throw DomainMismatch("cost matrix row count mismatch");
    }
    for (const auto& row : costs) {
        if (row.size() != demands.size()) {
            throw DomainMismatch("cost matrix column count mismatch");
        }
        for (double c : row) {
            if (!(c >= 0.0) || !std::isfinite(c)) {
                throw DomainMismatch("costs must be nonnegative and finite");
            }
        }
    }
    if (std::abs(total(supplies) - 1.0) > 10 * kMassTol ||
        std::abs(total(demands) - 1.0) > 10 * kMassTol) {
        throw DomainMismatch("supplies and demands must each sum to 1");
    }
}

double FlowResult::nonzero_cost_mass(const FlowNetwork& net, double tol) const {
    double mass = 0.0;
    for (std::size_t i = 0; i < flow.size(); ++i) {
        for (std::size_t j = 0; j < flow[i].size(); ++j) {
            if (net.costs[i][j] > tol) mass += flow[i][j];
        }
    }
    return mass;
}

double FlowResult::feasibility_residual(const FlowNetwork& net) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < net.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < net.cols(); ++j) row += flow[i][j];
        worst = std::max(worst, std::abs(row - net.supplies[i]));
    }
    for (std::size_t j = 0; j < net.cols(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < net.rows(); ++i) col += flow[i][j];
        worst = std::max(worst, std::abs(col - net.demands[j]));
    }
    return worst;
}

FlowNetwork make_l1_network(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.domain() != q.domain()) throw DomainMismatch("emd: domains differ");
    FlowNetwork net;
    net.supplies = p.weights();
    net.demands = q.weights();
    net.costs.assign(p.support_size(), std::vector<double>(q.support_size(), 0.0));
    for (std::size_t i = 0; i < p.support_size(); ++i) {
        for (std::size_t j = 0; j < q.support_size(); ++j) {
            net.costs[i][j] = l1_norm_distance(p.point(i), q.point(j));
        }
    }
    return net;
}

FlowNetwork make_matrix_network(const std::vector<std::vector<double>>& dist,
                                const std::vector<double>& p,
                                const std::vector<double>& q) {
    const std::size_t n = dist.size();
    if (p.size() != n || q.size() != n) {
        throw DomainMismatch("matrix instance: p, q and dist sizes differ");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i].size() != n) throw DomainMismatch("distance matrix must be square");
        if (std::abs(dist[i][i]) > 0.0) {
            throw DomainMismatch("distance matrix must have zero diagonal");
        }
    }
    FlowNetwork net;
    net.supplies = p;
    net.demands = q;
    net.costs = dist;
    // Zero-weight entries stay so row/column i of the matrix keeps meaning
    // element i; the solver skips them via zero supply/demand.
    return net;
}

// Successive shortest paths with node potentials on the bipartite
// transportation instance. Augmenting paths are found by Dijkstra on
// reduced costs; the bottleneck is the min of the head supply, the sink
// demand and any reverse-edge flows on the path, so each augmentation
// zeroes one of those exactly and the loop terminates.
FlowResult solve_min_cost_flow(const FlowNetwork& net) {
    net.validate();
    const std::size_t n = net.rows();
    const std::size_t m = net.cols();

    std::vector<double> supply_left = net.supplies;
    std::vector<double> demand_left = net.demands;
    // Rescale so both sides sum to the same total; the final augmentations
    // then clear both sides down to float noise.
    const double sp = total(supply_left);
    const double sq = total(demand_left);
    for (double& s : supply_left) s /= sp;
    for (double& d : demand_left) d /= sq;

    FlowResult result;
    result.flow.assign(n, std::vector<double>(m, 0.0));

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> pot_s(n, 0.0), pot_t(m, 0.0);
    std::vector<double> dist_s(n), dist_t(m);
    std::vector<int> parent_t(m);  // supply node whose forward edge reached t_j
    std::vector<int> parent_s(n);  // demand node whose reverse edge reached s_i (-1 = path head)
    std::vector<std::int8_t> done_s(n), done_t(m);

    auto any_left = [&](const std::vector<double>& v) {
        for (double x : v) {
            if (x > kResidualTol) return true;
        }
        return false;
    };

    // Interior (reverse-edge) bottlenecks are rare but possible, so the
    // iteration bound is generous rather than n+m.
    std::size_t guard = 1000 * (n + m) + 1000;
    while (any_left(supply_left) && any_left(demand_left)) {
        if (guard-- == 0) throw SolverFailure("augmentation loop exceeded bound");

        std::fill(dist_s.begin(), dist_s.end(), inf);
        std::fill(dist_t.begin(), dist_t.end(), inf);
        std::fill(done_s.begin(), done_s.end(), 0);
        std::fill(done_t.begin(), done_t.end(), 0);
        std::fill(parent_t.begin(), parent_t.end(), -1);
        std::fill(parent_s.begin(), parent_s.end(), -1);

        using QItem = std::pair<double, std::uint32_t>;  // (dist, node id); t offset by n
        std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;
        for (std::size_t i = 0; i < n; ++i) {
            if (supply_left[i] > kResidualTol) {
                dist_s[i] = 0.0;
                queue.emplace(0.0, static_cast<std::uint32_t>(i));
            }
        }

        while (!queue.empty()) {
            auto [d, node] = queue.top();
            queue.pop();
            if (node < n) {
                const std::size_t i = node;
                if (done_s[i] || d > dist_s[i]) continue;
                done_s[i] = 1;
                for (std::size_t j = 0; j < m; ++j) {
                    // forward edge s_i -> t_j, unlimited capacity
                    double rc = net.costs[i][j] + pot_s[i] - pot_t[j];
                    if (rc < 0.0) rc = 0.0;  // clamp float noise in reduced costs
                    if (!done_t[j] && dist_s[i] + rc < dist_t[j]) {
                        dist_t[j] = dist_s[i] + rc;
                        parent_t[j] = static_cast<int>(i);
                        queue.emplace(dist_t[j], static_cast<std::uint32_t>(n + j));
                    }
                }
            } else {
                const std::size_t j = node - n;
                if (done_t[j] || d > dist_t[j]) continue;
                done_t[j] = 1;
                for (std::size_t i = 0; i < n; ++i) {
                    // reverse edge t_j -> s_i exists while flow(i, j) > 0
                    if (result.flow[i][j] <= 0.0 || done_s[i]) continue;
                    double rc = -net.costs[i][j] - pot_s[i] + pot_t[j];
                    if (rc < 0.0) rc = 0.0;
                    if (dist_t[j] + rc < dist_s[i]) {
                        dist_s[i] = dist_t[j] + rc;
                        parent_s[i] = static_cast<int>(j);
                        queue.emplace(dist_s[i], static_cast<std::uint32_t>(i));
                    }
                }
            }
        }

        // Nearest demand node with residual demand; deterministic index
        // tie-break keeps runs reproducible.
        std::size_t best_j = m;
        for (std::size_t j = 0; j < m; ++j) {
            if (demand_left[j] > kResidualTol && dist_t[j] < inf) {
                if (best_j == m || dist_t[j] < dist_t[best_j]) best_j = j;
            }
        }
        if (best_j == m) break;  // leftovers are float noise

        // Reconstruct the path through the parent pointers.
        std::vector<std::pair<std::size_t, std::size_t>> gains;   // forward edges
        std::vector<std::pair<std::size_t, std::size_t>> losses;  // reverse edges
        double bottleneck = demand_left[best_j];
        std::size_t j = best_j;
        std::size_t head = n;
        while (true) {
            const std::size_t i = static_cast<std::size_t>(parent_t[j]);
            gains.emplace_back(i, j);
            if (parent_s[i] < 0) {
                head = i;
                bottleneck = std::min(bottleneck, supply_left[i]);
                break;
            }
            const std::size_t b = static_cast<std::size_t>(parent_s[i]);
            losses.emplace_back(i, b);
            bottleneck = std::min(bottleneck, result.flow[i][b]);
            j = b;
        }
        if (!(bottleneck > 0.0)) throw SolverFailure("zero bottleneck");

        for (auto [fi, fj] : gains) result.flow[fi][fj] += bottleneck;
        for (auto [ri, rj] : losses) result.flow[ri][rj] -= bottleneck;
        supply_left[head] -= bottleneck;
        demand_left[best_j] -= bottleneck;
        if (supply_left[head] < kResidualTol) supply_left[head] = 0.0;
        if (demand_left[best_j] < kResidualTol) demand_left[best_j] = 0.0;

        // Potential update capped at the sink distance keeps reduced costs
        // nonnegative with multiple sinks.
        const double cap = dist_t[best_j];
        for (std::size_t i = 0; i < n; ++i) pot_s[i] += std::min(dist_s[i], cap);
        for (std::size_t t = 0; t < m; ++t) pot_t[t] += std::min(dist_t[t], cap);
    }

    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) cost += result.flow[i][j] * net.costs[i][j];
    }
    result.cost = cost;
    if (result.feasibility_residual(net) > 1e-9) {
        throw SolverFailure("flow residual above tolerance");
    }
    return result;
}

double min_cost_flow_value(const FlowNetwork& net) {
    return solve_min_cost_flow(net).cost;
}

namespace {

// Lexicographic order on (points, weights) for canonical argument order.
bool dist_less(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    if (a.points() != b.points()) return a.points() < b.points();
    return a.weights() < b.weights();
}

// Reroutes two-edge detours through (x, x) until every zero-cost
// diagonal edge carries min{p(x), q(x)}. Cost-preserving at an optimal
// flow (the detour and the direct edge cost the same there).
void saturate_diagonal(FlowResult& result, const FlowNetwork& net,
                       const std::vector<std::pair<std::size_t, std::size_t>>& diagonal) {
    for (auto [i, j] : diagonal) {
        const double want = std::min(net.supplies[i], net.demands[j]);
        double deficit = want - result.flow[i][j];
        while (deficit > kResidualTol) {
            std::size_t y = net.cols(), z = net.rows();
            for (std::size_t cand = 0; cand < net.cols(); ++cand) {
                if (cand != j && result.flow[i][cand] > kResidualTol) {
                    y = cand;
                    break;
                }
            }
            for (std::size_t cand = 0; cand < net.rows(); ++cand) {
                if (cand != i && result.flow[cand][j] > kResidualTol) {
                    z = cand;
                    break;
                }
            }
            if (y == net.cols() || z == net.rows()) break;  // deficit is float noise
            const double alpha = std::min({deficit, result.flow[i][y], result.flow[z][j]});
            result.flow[i][y] -= alpha;
            result.flow[z][j] -= alpha;
            result.flow[i][j] += alpha;
            result.flow[z][y] += alpha;
            result.cost += alpha * (net.costs[z][y] - net.costs[i][y] - net.costs[z][j]);
            deficit -= alpha;
        }
    }
}

}  // namespace

double emd_exact(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.domain() != q.domain()) throw DomainMismatch("emd_exact: domains differ");
    if (p == q) return 0.0;
    // Canonical orientation makes emd_exact(p, q) bit-equal to emd_exact(q, p).
    const bool swap = dist_less(q, p);
    const DiscreteDistribution& a = swap ? q : p;
    const DiscreteDistribution& b = swap ? p : q;
    return min_cost_flow_value(make_l1_network(a, b));
}

double emd_exact_matrix(const std::vector<std::vector<double>>& dist,
                        const std::vector<double>& p,
                        const std::vector<double>& q) {
    const bool swap = q < p;
    const auto& a = swap ? q : p;
    const auto& b = swap ? p : q;
    if (swap) {
        std::vector<std::vector<double>> t(dist.size(), std::vector<double>(dist.size()));
        for (std::size_t i = 0; i < dist.size(); ++i)
            for (std::size_t j = 0; j < dist.size(); ++j) t[i][j] = dist[j][i];
        return min_cost_flow_value(make_matrix_network(t, a, b));
    }
    return min_cost_flow_value(make_matrix_network(dist, a, b));
}

FlowResult optimal_flow(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    FlowNetwork net = make_l1_network(p, q);
    FlowResult result = solve_min_cost_flow(net);
    std::vector<std::pair<std::size_t, std::size_t>> diagonal;
    for (std::size_t i = 0; i < p.support_size(); ++i) {
        for (std::size_t j = 0; j < q.support_size(); ++j) {
            if (p.point(i) == q.point(j)) diagonal.emplace_back(i, j);
        }
    }
    saturate_diagonal(result, net, diagonal);
    return result;
}

FlowResult optimal_flow_matrix(const std::vector<std::vector<double>>& dist,
                               const std::vector<double>& p,
                               const std::vector<double>& q) {
    FlowNetwork net = make_matrix_network(dist, p, q);
    FlowResult result = solve_min_cost_flow(net);
    std::vector<std::pair<std::size_t, std::size_t>> diagonal;
    for (std::size_t i = 0; i < dist.size(); ++i) diagonal.emplace_back(i, i);
    saturate_diagonal(result, net, diagonal);
    return result;
}

std::pair<double, double> emd_bounds(const DiscreteDistribution& p,
                                     const DiscreteDistribution& q,
                                     double min_dist, double diameter) {
    if (p.domain() != q.domain()) throw DomainMismatch("emd_bounds: domains differ");
    const double half_l1 = l1_distance(p, q) / 2.0;
    return {half_l1 * min_dist, half_l1 * diameter};
}

std::pair<double, double> emd_bounds(const DiscreteDistribution& p,
                                     const DiscreteDistribution& q) {
    if (p.domain() != q.domain()) throw DomainMismatch("emd_bounds: domains differ");
    std::vector<Point> support = p.points();
    support.insert(support.end(), q.points().begin(), q.points().end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());

    double min_dist = 0.0;
    double diameter = 0.0;
    if (support.size() >= 2) {
        min_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < support.size(); ++i) {
            for (std::size_t j = i + 1; j < support.size(); ++j) {
                const double d = l1_norm_distance(support[i], support[j]);
                min_dist = std::min(min_dist, d);
                diameter = std::max(diameter, d);
            }
        }
    }
    return emd_bounds(p, q, min_dist, diameter);
}

EpsilonNet::EpsilonNet(int dim, double span, double eps)
    : dim_(dim), span_(span), eps_(eps) {
    if (!(eps > 0.0)) throw ParamError("eps must be positive");
    if (dim < 1 || !(span > 0.0)) throw DomainError("bad domain");
    const double ratio = 4.0 * dim * span / eps;
    level_ = std::max(1, static_cast<int>(std::ceil(std::log2(ratio))));
    cell_side_ = span / std::pow(2.0, level_);
}

Point EpsilonNet::snap(const Point& p) const {
    CellIndex cell = cell_of(p, level_, dim_, span_);
    Point out;
    out.coords.resize(static_cast<std::size_t>(dim_));
    for (int j = 0; j < dim_; ++j) {
        out.coords[static_cast<std::size_t>(j)] =
            (static_cast<double>(cell.cell[static_cast<std::size_t>(j)]) + 0.5) * cell_side_;
    }
    return out;
}

DiscreteDistribution EpsilonNet::snap(const DiscreteDistribution& dist) const {
    std::vector<std::pair<Point, double>> pw;
    pw.reserve(dist.support_size());
    for (std::size_t i = 0; i < dist.support_size(); ++i) {
        pw.emplace_back(snap(dist.point(i)), dist.weight(i));
    }
    return DiscreteDistribution(std::move(pw), dist.domain());
}

}  // namespace emdtest
