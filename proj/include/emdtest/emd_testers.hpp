#pragma once

#include <cstdint>
#include <vector>

#include "emdtest/coarsening.hpp"
#include "emdtest/distribution.hpp"
#include "emdtest/l1_testers.hpp"

namespace emdtest {

enum class L1Strategy { Plugin, Collision, Auto };

/// Which subroutine a level actually ran.
enum class SubroutineKind { Plugin, Collision, Known };

const char* to_string(L1Strategy s);
const char* to_string(SubroutineKind s);

struct EmdTestConfig {
    int dim = 1;
    double span = 1.0;
    double eps = 0.25;
    L1Strategy strategy = L1Strategy::Auto;
    double c = 1.0;
};

/// Per-level trace of the multi-resolution tester.
struct LevelOutcome {
    int level = 0;
    double domain_size = 0.0;  // 2^(dim * level)
    double eps_i = 0.0;
    double delta_i = 0.0;
    SubroutineKind used = SubroutineKind::Plugin;
    Decision decision = Decision::Accept;
    std::uint64_t samples_p = 0;
    std::uint64_t samples_q = 0;
};

/// Result of the additive-error estimator.
struct EstimateReport {
    double estimate = 0.0;
    double eps = 0.0;
    double delta = 1.0 / 3.0;
    std::uint64_t samples_p = 0;
    std::uint64_t samples_q = 0;
    double grid_side = 0.0;
    std::uint64_t seed_p = 0;
    std::uint64_t seed_q = 0;

    std::uint64_t samples_total() const { return samples_p + samples_q; }
};

/// Number of levels the closeness tester runs:
/// ceil(log2(2 * span * dim / eps)); zero when eps >= 2 * span * dim.
int emd_test_levels(const EmdTestConfig& cfg);

/// Distance parameter handed to the level-i l1 subroutine:
/// eps * 2^(i-2) / (span * dim * levels).
double emd_test_level_eps(const EmdTestConfig& cfg, int level);

/// Per-level failure probability 1 / (3 * levels).
double emd_test_level_delta(const EmdTestConfig& cfg);

/// Picks the cheaper l1 subroutine for a level: dims <= 2 always use the
/// plug-in tester, dims >= 6 the collision tester, and in between the one
/// with the smaller computed budget wins (ties to plug-in).
L1Strategy choose_l1_subroutine(int dim, double domain_size, double eps_i, double delta_i,
                                double c);

/// Multi-resolution EMD-closeness tester for two sampled distributions
/// over [0, span]^dim: runs an l1 closeness subroutine on the
/// i-coarsenings of p and q for every level and rejects iff some level
/// rejects. Accepts p == q and rejects EMD(p, q) > eps, each with
/// probability >= 2/3 at calibrated c.
///
/// Every level runs on fresh draws (no sample reuse), and all levels run
/// even after a rejection so the total draw count is a pure function of
/// the config. The degenerate case eps >= 2 * span * dim accepts
/// unconditionally with zero draws (every pair is closer than eps).
TestVerdict emd_closeness_test(SampleSource& src_p, SampleSource& src_q,
                               const EmdTestConfig& cfg,
                               std::vector<LevelOutcome>* level_log = nullptr);

/// One-known variant: the explicit distribution is coarsened exactly at
/// every level (zero draws on that side) and each level runs the
/// known-distribution identity tester with the sqrt-size budget.
TestVerdict emd_closeness_test_known(const DiscreteDistribution& q_known,
                                     SampleSource& src_p, const EmdTestConfig& cfg,
                                     std::vector<LevelOutcome>* level_log = nullptr);

/// Per-source budget of the additive estimator: ceil(c * (4*dim*span/eps)^(dim+2)).
std::uint64_t budget_emd_approx(int dim, double span, double eps, double c);

/// Additive-error EMD estimator: snaps draws to the centers of the grid
/// with side eps/(4*dim), builds empirical distributions on the centers
/// and returns their exact EMD. With probability >= 2/3 the estimate is
/// within +-eps of EMD(p, q). Throws ConfigError when eps >= 4*dim*span.
EstimateReport emd_estimate(SampleSource& src_p, SampleSource& src_q,
                            const EmdTestConfig& cfg);

/// Center of the estimator grid cell containing a point; the last cell
/// per axis is truncated at the span and its center clamped inside, so
/// the l1 snap displacement stays <= eps/4.
Point approx_grid_center(const Point& p, int dim, double span, double grid_side);

}  // namespace emdtest
