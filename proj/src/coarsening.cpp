#include "emdtest/coarsening.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace emdtest {

double CoarseningLevel::mass_of(std::int64_t key) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), key,
                               [](const auto& c, std::int64_t k) { return c.first < k; });
    return (it != cells.end() && it->first == key) ? it->second : 0.0;
}

double CoarseningLevel::total_mass() const {
    double sum = 0.0;
    for (const auto& [key, w] : cells) sum += w;
    return sum;
}

CellIndex cell_of(const Point& p, int level, int dim, double span) {
    if (level < 1) throw DomainError("coarsening level must be >= 1");
    if (static_cast<int>(p.dim()) != dim) throw DomainError("point dimension mismatch");
    const double cells_per_axis = std::pow(2.0, level);
    CellIndex idx;
    idx.level = level;
    idx.cell.resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        const double c = p.coords[static_cast<std::size_t>(j)];
        if (!(c >= 0.0) || !(c <= span)) throw DomainError("point outside [0, span]^dim");
        auto k = static_cast<std::int64_t>(std::floor(c / span * cells_per_axis));
        const auto last = static_cast<std::int64_t>(cells_per_axis) - 1;
        if (k > last) k = last;  // top boundary closed
        if (k < 0) k = 0;
        idx.cell[static_cast<std::size_t>(j)] = k;
    }
    return idx;
}

std::int64_t cell_key(const CellIndex& idx, int dim) {
    if (static_cast<std::int64_t>(dim) * idx.level > 62) {
        throw ConfigError("grid too deep to index (dim * level > 62)");
    }
    std::int64_t key = 0;
    for (int j = dim - 1; j >= 0; --j) {
        key = (key << idx.level) | idx.cell[static_cast<std::size_t>(j)];
    }
    return key;
}

CellIndex cell_from_key(std::int64_t key, int level, int dim) {
    CellIndex idx;
    idx.level = level;
    idx.cell.resize(static_cast<std::size_t>(dim));
    const std::int64_t mask = (std::int64_t{1} << level) - 1;
    for (int j = 0; j < dim; ++j) {
        idx.cell[static_cast<std::size_t>(j)] = key & mask;
        key >>= level;
    }
    return idx;
}

double level_domain_size(int level, int dim) {
    return std::pow(2.0, static_cast<double>(dim) * level);
}

CoarseningLevel coarsen(const DiscreteDistribution& p, int level) {
    std::map<std::int64_t, double> acc;
    for (std::size_t i = 0; i < p.support_size(); ++i) {
        const auto key = cell_key(cell_of(p.point(i), level, p.dim(), p.span()), p.dim());
        acc[key] += p.weight(i);
    }
    CoarseningLevel out;
    out.level = level;
    out.cells.assign(acc.begin(), acc.end());
    return out;
}

double l1_distance(const CoarseningLevel& a, const CoarseningLevel& b) {
    if (a.level != b.level) throw DomainMismatch("coarsening levels differ");
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.cells.size() && j < b.cells.size()) {
        if (a.cells[i].first < b.cells[j].first) {
            sum += a.cells[i++].second;
        } else if (b.cells[j].first < a.cells[i].first) {
            sum += b.cells[j++].second;
        } else {
            sum += std::abs(a.cells[i++].second - b.cells[j++].second);
        }
    }
    for (; i < a.cells.size(); ++i) sum += a.cells[i].second;
    for (; j < b.cells.size(); ++j) sum += b.cells[j].second;
    return sum;
}

int coarsening_levels(int dim, double span, double eps) {
    if (!(eps > 0.0)) throw ParamError("eps must be positive");
    const double ratio = 2.0 * span * dim / eps;
    if (ratio <= 1.0) return 0;
    return static_cast<int>(std::ceil(std::log2(ratio)));
}

double coarsening_bound(const DiscreteDistribution& p, const DiscreteDistribution& q,
                        double eps) {
    if (p.domain() != q.domain()) throw DomainMismatch("coarsening_bound: domains differ");
    const int levels = coarsening_levels(p.dim(), p.span(), eps);
    double sum = 0.0;
    for (int i = 1; i <= levels; ++i) {
        const double cell_diag = p.span() / std::pow(2.0, i - 1);
        sum += cell_diag * l1_distance(coarsen(p, i), coarsen(q, i));
    }
    return static_cast<double>(p.dim()) * sum + eps / 2.0;
}

}  // namespace emdtest
