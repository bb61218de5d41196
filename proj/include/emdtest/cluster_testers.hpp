#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "emdtest/distribution.hpp"

namespace emdtest {

/// Promise parameters for the clusterable testers: at most
/// centers.size() clusters of l1 diameter <= diameter_bound covering all
/// but unclustered_mass_bound of the combined support.
struct ClusterModel {
    std::vector<Point> centers;
    double diameter_bound = 0.0;
    double unclustered_mass_bound = 0.0;
};

/// Index of the nearest center under l1; ties go to the lowest index.
std::size_t assign_to_centers(const Point& p, const std::vector<Point>& centers);

/// Closeness tester for distributions whose combined support is
/// (k, eps/2)-clusterable around known centers: draws are mapped to their
/// nearest center and the collision l1 tester runs over the k centers
/// with distance parameter eps/(dim*span). Two-sided 2/3 contract when
/// the promise holds; promise violations void the guarantee, not the run.
///
/// domain_size overrides the n used in the budget formula and thresholds
/// (0 = centers.size()); the unknown-centers wrapper passes the promised
/// k there so its total budget stays a pure function of the config even
/// when the scan returns fewer representatives.
TestVerdict emd_test_clustered_known(SampleSource& src_p, SampleSource& src_q,
                                     const std::vector<Point>& centers, double eps,
                                     int dim, double span, double c = 1.0,
                                     std::size_t domain_size = 0);

/// Draw count of the representative scan: ceil(c * k * max(log2 k, 1) / gamma).
std::uint64_t budget_representatives(std::size_t k, double gamma, double c);

/// Greedy representative scan over a sample stream: a draw farther than
/// 2b (l1) from every current representative becomes one; more than k
/// representatives means the source is far from clusterable and the scan
/// rejects (nullopt). Otherwise the returned model holds k' <= k centers
/// of a (k, 2b)-clustering of all but a gamma fraction of the mass; no
/// two of them lie within 2b of each other.
std::optional<ClusterModel> find_representatives(const std::function<Point()>& draw,
                                                 std::size_t k, double b, double gamma,
                                                 double c = 1.0);

/// Convenience overload over a single source.
std::optional<ClusterModel> find_representatives(SampleSource& src, std::size_t k,
                                                 double b, double gamma, double c = 1.0);

/// Unknown-centers variant: representatives are found on the merged
/// stream (alternating p, q draws) with b = eps/4 and
/// gamma = eps/(4*dim*span); the scan rejecting propagates as a Reject,
/// otherwise the known-centers tester runs with the found centers.
TestVerdict emd_test_clustered_unknown(SampleSource& src_p, SampleSource& src_q,
                                       std::size_t k, double eps, int dim, double span,
                                       double c = 1.0);

}  // namespace emdtest
