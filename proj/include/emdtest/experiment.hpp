#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emdtest/cluster_testers.hpp"
#include "emdtest/distribution.hpp"
#include "emdtest/emd_testers.hpp"
#include "emdtest/tree_emd.hpp"

namespace emdtest {

enum class ExperimentMode { Estimate, Test, TestKnown, TestCluster, Tree };

const char* to_string(ExperimentMode m);
ExperimentMode experiment_mode_from_string(const std::string& s);

/// A reproducible trial battery: `trials` independent runs of one tester
/// or estimator on one explicit instance. Trial t draws its sources with
/// seeds base_seed + 2t (p side) and base_seed + 2t + 1 (q side), so the
/// whole battery is a pure function of this config.
struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::Test;
    std::optional<DiscreteDistribution> p;
    std::optional<DiscreteDistribution> q;
    std::optional<WeightedTree> tree;  // Tree mode
    std::vector<Point> centers;        // TestCluster: known centers when non-empty
    std::size_t k = 0;                 // TestCluster: cluster count when centers empty
    double eps = 0.25;
    double delta = 1.0 / 3.0;          // Tree estimator failure probability
    int trials = 1;
    std::uint64_t base_seed = 1;
    double c = 1.0;
    L1Strategy strategy = L1Strategy::Auto;
    int threads = 0;                   // 0 = hardware concurrency
    bool compute_oracle = true;
    std::string generator;             // provenance echo for reports
    std::string rng = std::string(Rng::kName);  // only mt19937_64 is implemented
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed_p = 0;
    std::uint64_t seed_q = 0;
    std::optional<Decision> decision;
    std::optional<double> estimate;
    std::uint64_t samples_p = 0;
    std::uint64_t samples_q = 0;
};

struct TrialReport {
    std::vector<TrialResult> trials;
    std::uint64_t accepts = 0;
    std::uint64_t rejects = 0;
    double accept_rate = 0.0;
    std::optional<double> mean_estimate;
    std::optional<double> oracle_emd;
};

/// Runs the battery; trials execute in a parallel pool (each owns its
/// sources and seeds) and the report is assembled in trial order, so
/// identical configs give byte-identical reports.
TrialReport run_experiment(const ExperimentConfig& cfg);

nlohmann::ordered_json report_to_json(const ExperimentConfig& cfg, const TrialReport& report);
std::string report_to_csv(const ExperimentConfig& cfg, const TrialReport& report);

}  // namespace emdtest
