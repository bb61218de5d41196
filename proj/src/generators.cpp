#include "emdtest/generators.hpp"

#include <cmath>

namespace emdtest {

std::pair<DiscreteDistribution, DiscreteDistribution> gen_hard_pair_1d(double span,
                                                                       double eps) {
    if (!(span > 0.0)) throw ParamError("span must be positive");
    if (!(eps >= 0.0) || eps > span / 2.0) {
        throw ParamError("need 0 <= eps <= span/2");
    }
    const double bias = eps / span;
    std::vector<std::pair<Point, double>> pw = {{Point{0.0}, 0.5}, {Point{span}, 0.5}};
    std::vector<std::pair<Point, double>> qw;
    qw.emplace_back(Point{0.0}, 0.5 + bias);
    if (0.5 - bias > 0.0) qw.emplace_back(Point{span}, 0.5 - bias);
    return {new_distribution(std::move(pw), 1, span), new_distribution(std::move(qw), 1, span)};
}

double grid_injection_pitch(std::size_t n, int dim, double span) {
    if (n == 0) throw ParamError("n must be >= 1");
    if (dim < 1 || !(span > 0.0)) throw ParamError("bad domain");
    return span * std::pow(static_cast<double>(n), -1.0 / dim);
}

namespace {

Point lattice_point(std::size_t index, std::size_t per_axis, int dim, double pitch,
                    double span) {
    Point pt;
    pt.coords.resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        const std::size_t digit = index % per_axis;
        index /= per_axis;
        pt.coords[static_cast<std::size_t>(j)] =
            std::min(static_cast<double>(digit) * pitch, span);
    }
    return pt;
}

}  // namespace

std::pair<DiscreteDistribution, DiscreteDistribution> gen_grid_injection(
    const std::vector<double>& p_abstract, const std::vector<double>& q_abstract,
    std::size_t n, int dim, double span) {
    if (p_abstract.size() != n || q_abstract.size() != n) {
        throw ParamError("abstract distributions must have n entries");
    }
    const double pitch = grid_injection_pitch(n, dim, span);
    const auto per_axis = static_cast<std::size_t>(std::floor(span / pitch)) + 1;
    double capacity = 1.0;
    for (int j = 0; j < dim; ++j) capacity *= static_cast<double>(per_axis);
    if (static_cast<double>(n) > capacity) {
        throw ParamError("n exceeds lattice capacity");
    }

    auto inject = [&](const std::vector<double>& weights) {
        std::vector<std::pair<Point, double>> pw;
        for (std::size_t i = 0; i < n; ++i) {
            if (weights[i] > 0.0) {
                pw.emplace_back(lattice_point(i, per_axis, dim, pitch, span), weights[i]);
            }
        }
        return new_distribution(std::move(pw), dim, span);
    };
    return {inject(p_abstract), inject(q_abstract)};
}

std::vector<Point> clustered_centers(std::size_t k, double b, int dim, double span) {
    if (k == 0) throw ParamError("k must be >= 1");
    if (!(b > 0.0) || dim < 1 || !(span > 0.0)) throw ParamError("bad cluster params");

    std::vector<Point> centers;
    if (k == 1) {
        Point c;
        c.coords.assign(static_cast<std::size_t>(dim), span / 2.0);
        centers.push_back(std::move(c));
        return centers;
    }
    if (k == 2) {
        Point a, z;
        a.coords.assign(static_cast<std::size_t>(dim), 0.0);
        z.coords.assign(static_cast<std::size_t>(dim), span);
        if (!(static_cast<double>(dim) * span > 4.0 * b)) {
            throw ParamError("centers closer than 4b");
        }
        return {a, z};
    }

    const auto per_axis =
        static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(k), 1.0 / dim)));
    const double spacing = per_axis > 1 ? span / static_cast<double>(per_axis - 1) : span;
    if (!(spacing > 4.0 * b)) throw ParamError("centers closer than 4b");
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t rest = i;
        Point c;
        c.coords.resize(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) {
            c.coords[static_cast<std::size_t>(j)] =
                std::min(static_cast<double>(rest % per_axis) * spacing, span);
            rest /= per_axis;
        }
        centers.push_back(std::move(c));
    }
    return centers;
}

ClusteredPair gen_clustered(std::size_t k, double b, int dim, double span,
                            double imbalance) {
    if (!(imbalance >= 0.0) || imbalance > 1.0 / static_cast<double>(k)) {
        throw ParamError("imbalance must be in [0, 1/k]");
    }
    if (k == 1 && imbalance > 0.0) {
        throw ParamError("imbalance needs at least two clusters");
    }
    std::vector<Point> centers = clustered_centers(k, b, dim, span);

    // Three points per cluster within l1 radius b/2 of its center, so
    // every cluster has diameter <= b. Offsets point into the domain.
    auto cluster_points = [&](const Point& center) {
        std::vector<Point> pts = {center, center, center};
        const double toward0 = center.coords[0] <= span / 2.0 ? 1.0 : -1.0;
        pts[1].coords[0] += toward0 * (b / 2.0);
        const std::size_t last = static_cast<std::size_t>(dim) - 1;
        const double towardL = center.coords[last] <= span / 2.0 ? 1.0 : -1.0;
        pts[2].coords[last] += towardL * (b / 4.0);
        return pts;
    };
    const double share[3] = {0.5, 0.3, 0.2};

    std::vector<std::pair<Point, double>> pw, qw;
    for (std::size_t ci = 0; ci < k; ++ci) {
        double p_mass = 1.0 / static_cast<double>(k);
        double q_mass = p_mass;
        if (k >= 2 && ci == 0) q_mass -= imbalance;
        if (k >= 2 && ci == 1) q_mass += imbalance;
        const auto pts = cluster_points(centers[ci]);
        for (int s = 0; s < 3; ++s) {
            pw.emplace_back(pts[static_cast<std::size_t>(s)], p_mass * share[s]);
            if (q_mass > 0.0) {
                qw.emplace_back(pts[static_cast<std::size_t>(s)], q_mass * share[s]);
            }
        }
    }
    ClusteredPair out{new_distribution(std::move(pw), dim, span),
                      new_distribution(std::move(qw), dim, span), std::move(centers)};
    return out;
}

}  // namespace emdtest
