#include "emdtest/emd_testers.hpp"

#include <cmath>

#include "emdtest/exact_emd.hpp"

namespace emdtest {

const char* to_string(L1Strategy s) {
    switch (s) {
        case L1Strategy::Plugin: return "plugin";
        case L1Strategy::Collision: return "collision";
        case L1Strategy::Auto: return "auto";
    }
    return "?";
}

const char* to_string(SubroutineKind s) {
    switch (s) {
        case SubroutineKind::Plugin: return "plugin";
        case SubroutineKind::Collision: return "collision";
        case SubroutineKind::Known: return "known";
    }
    return "?";
}

namespace {

void check_cfg(const EmdTestConfig& cfg) {
    if (cfg.dim < 1) throw ConfigError("dim must be >= 1");
    if (!(cfg.span > 0.0)) throw ConfigError("span must be positive");
    if (!(cfg.eps > 0.0)) throw ConfigError("eps must be positive");
    if (!(cfg.c > 0.0)) throw ConfigError("budget multiplier must be positive");
}

}  // namespace

int emd_test_levels(const EmdTestConfig& cfg) {
    check_cfg(cfg);
    return coarsening_levels(cfg.dim, cfg.span, cfg.eps);
}

double emd_test_level_eps(const EmdTestConfig& cfg, int level) {
    const int levels = emd_test_levels(cfg);
    return cfg.eps * std::pow(2.0, level - 2) / (cfg.span * cfg.dim * levels);
}

double emd_test_level_delta(const EmdTestConfig& cfg) {
    return 1.0 / (3.0 * emd_test_levels(cfg));
}

L1Strategy choose_l1_subroutine(int dim, double domain_size, double eps_i, double delta_i,
                                double c) {
    if (dim <= 2) return L1Strategy::Plugin;
    if (dim >= 6) return L1Strategy::Collision;
    const double plugin = budget_plugin_real(domain_size, eps_i, delta_i, c);
    const double collision = budget_collision_real(domain_size, eps_i, delta_i, c);
    return plugin <= collision ? L1Strategy::Plugin : L1Strategy::Collision;
}

namespace {

// Shared wrapper logic; the known-distribution variant passes run_known.
TestVerdict run_levels(SampleSource& src_p, SampleSource* src_q,
                       const DiscreteDistribution* q_known, const EmdTestConfig& cfg,
                       std::vector<LevelOutcome>* level_log) {
    check_cfg(cfg);
    const int levels = emd_test_levels(cfg);

    TestVerdict verdict;
    verdict.eps = cfg.eps;
    verdict.delta = 1.0 / 3.0;
    verdict.span = cfg.span;
    verdict.dim = cfg.dim;

    if (levels == 0) {
        // eps >= 2 * span * dim: every pair has EMD <= dim * span < eps,
        // so accepting is always correct and no draws are needed.
        return verdict;
    }
    if (static_cast<std::int64_t>(cfg.dim) * levels > 62) {
        throw ConfigError("coarsening hierarchy too deep to index");
    }

    const std::uint64_t p_before = src_p.draws_taken();
    const std::uint64_t q_before = src_q ? src_q->draws_taken() : 0;
    const double delta_i = emd_test_level_delta(cfg);
    bool rejected = false;

    for (int i = 1; i <= levels; ++i) {
        const double n_i = level_domain_size(i, cfg.dim);
        const double eps_i = emd_test_level_eps(cfg, i);
        L1TesterConfig sub{n_i, eps_i, delta_i, cfg.c};

        auto to_cell = [&, i](const Point& pt) {
            return cell_key(cell_of(pt, i, cfg.dim, cfg.span), cfg.dim);
        };
        MappedIndexSource p_cells(src_p, to_cell);

        LevelOutcome outcome;
        outcome.level = i;
        outcome.domain_size = n_i;
        outcome.eps_i = eps_i;
        outcome.delta_i = delta_i;

        const std::uint64_t p_mark = src_p.draws_taken();
        TestVerdict lv;
        if (q_known != nullptr) {
            IndexedDist q_exact;
            q_exact.mass = coarsen(*q_known, i).cells;
            lv = l1_test_known(q_exact, p_cells, sub);
            outcome.used = SubroutineKind::Known;
        } else {
            L1Strategy strategy = cfg.strategy;
            if (strategy == L1Strategy::Auto) {
                strategy = choose_l1_subroutine(cfg.dim, n_i, eps_i, delta_i, cfg.c);
            }
            MappedIndexSource q_cells(*src_q, to_cell);
            lv = (strategy == L1Strategy::Collision)
                     ? l1_test_collision(p_cells, q_cells, sub)
                     : l1_test_plugin(p_cells, q_cells, sub);
            outcome.used = strategy == L1Strategy::Collision ? SubroutineKind::Collision
                                                             : SubroutineKind::Plugin;
        }
        outcome.decision = lv.decision;
        outcome.samples_p = src_p.draws_taken() - p_mark;
        outcome.samples_q = lv.samples_q;
        if (lv.decision == Decision::Reject) rejected = true;
        if (level_log) level_log->push_back(outcome);
        // All levels always run so the total budget is config-determined;
        // later levels cannot flip a rejection back to accept.
    }

    verdict.decision = rejected ? Decision::Reject : Decision::Accept;
    verdict.samples_p = src_p.draws_taken() - p_before;
    verdict.samples_q = src_q ? src_q->draws_taken() - q_before : 0;
    return verdict;
}

}  // namespace

TestVerdict emd_closeness_test(SampleSource& src_p, SampleSource& src_q,
                               const EmdTestConfig& cfg,
                               std::vector<LevelOutcome>* level_log) {
    if (src_p.domain() != src_q.domain()) {
        throw DomainMismatch("emd_closeness_test: source domains differ");
    }
    return run_levels(src_p, &src_q, nullptr, cfg, level_log);
}

TestVerdict emd_closeness_test_known(const DiscreteDistribution& q_known,
                                     SampleSource& src_p, const EmdTestConfig& cfg,
                                     std::vector<LevelOutcome>* level_log) {
    if (q_known.domain() != src_p.domain()) {
        throw DomainMismatch("emd_closeness_test_known: domains differ");
    }
    return run_levels(src_p, nullptr, &q_known, cfg, level_log);
}

std::uint64_t budget_emd_approx(int dim, double span, double eps, double c) {
    if (!(eps > 0.0) || !(c > 0.0) || dim < 1 || !(span > 0.0)) {
        throw ConfigError("bad estimator parameters");
    }
    const double value = std::ceil(c * std::pow(4.0 * dim * span / eps, dim + 2));
    if (value > 1e15) throw ConfigError("estimator budget too large to draw");
    return static_cast<std::uint64_t>(value);
}

Point approx_grid_center(const Point& p, int dim, double span, double grid_side) {
    const auto cells = static_cast<std::int64_t>(std::ceil(span / grid_side));
    Point out;
    out.coords.resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        const double coord = p.coords[static_cast<std::size_t>(j)];
        auto k = static_cast<std::int64_t>(std::floor(coord / grid_side));
        if (k >= cells) k = cells - 1;
        if (k < 0) k = 0;
        const double center = (static_cast<double>(k) + 0.5) * grid_side;
        out.coords[static_cast<std::size_t>(j)] = std::min(center, span);
    }
    return out;
}

EstimateReport emd_estimate(SampleSource& src_p, SampleSource& src_q,
                            const EmdTestConfig& cfg) {
    check_cfg(cfg);
    if (src_p.domain() != src_q.domain()) {
        throw DomainMismatch("emd_estimate: source domains differ");
    }
    if (cfg.eps >= 4.0 * cfg.dim * cfg.span) {
        throw ConfigError("eps too large: estimator grid has no cells");
    }
    const double grid_side = cfg.eps / (4.0 * cfg.dim);
    const std::uint64_t budget = budget_emd_approx(cfg.dim, cfg.span, cfg.eps, cfg.c);

    auto snap_stream = [&](SampleSource& src) {
        std::vector<Point> snapped;
        snapped.reserve(budget);
        for (std::uint64_t s = 0; s < budget; ++s) {
            snapped.push_back(approx_grid_center(src.draw(), cfg.dim, cfg.span, grid_side));
        }
        return empirical(snapped, cfg.dim, cfg.span);
    };
    const DiscreteDistribution p_hat = snap_stream(src_p);
    const DiscreteDistribution q_hat = snap_stream(src_q);

    EstimateReport report;
    report.estimate = emd_exact(p_hat, q_hat);
    report.eps = cfg.eps;
    report.delta = 1.0 / 3.0;
    report.samples_p = budget;
    report.samples_q = budget;
    report.grid_side = grid_side;
    report.seed_p = src_p.seed();
    report.seed_q = src_q.seed();
    return report;
}

}  // namespace emdtest
