#include "emdtest/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "emdtest/exact_emd.hpp"
#include "emdtest/io.hpp"

namespace emdtest {

const char* to_string(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::Estimate: return "estimate";
        case ExperimentMode::Test: return "test";
        case ExperimentMode::TestKnown: return "test-known";
        case ExperimentMode::TestCluster: return "test-cluster";
        case ExperimentMode::Tree: return "tree-emd";
    }
    return "?";
}

ExperimentMode experiment_mode_from_string(const std::string& s) {
    if (s == "estimate") return ExperimentMode::Estimate;
    if (s == "test") return ExperimentMode::Test;
    if (s == "test-known") return ExperimentMode::TestKnown;
    if (s == "test-cluster") return ExperimentMode::TestCluster;
    if (s == "tree-emd") return ExperimentMode::Tree;
    throw ParamError("unknown mode: " + s);
}

namespace {

void validate(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw ParamError("trials must be >= 1");
    if (!(cfg.eps > 0.0)) throw ParamError("eps must be positive");
    if (!(cfg.c > 0.0)) throw ParamError("c must be positive");
    if (cfg.rng != Rng::kName) {
        throw ParamError("unknown rng '" + cfg.rng + "' (supported: " +
                         std::string(Rng::kName) + ")");
    }
    if (!cfg.p || !cfg.q) throw ParamError("experiment needs both distributions");
    if (cfg.p->domain() != cfg.q->domain()) throw DomainMismatch("p and q domains differ");
    if (cfg.mode == ExperimentMode::Tree && !cfg.tree) {
        throw ParamError("tree mode needs a tree");
    }
    if (cfg.mode == ExperimentMode::TestCluster && cfg.centers.empty() && cfg.k == 0) {
        throw ParamError("cluster mode needs centers or k");
    }
}

TrialResult run_one_trial(const ExperimentConfig& cfg, int trial) {
    TrialResult out;
    out.trial = trial;
    out.seed_p = cfg.base_seed + 2 * static_cast<std::uint64_t>(trial);
    out.seed_q = out.seed_p + 1;

    SampleSource src_p(*cfg.p, out.seed_p);
    SampleSource src_q(*cfg.q, out.seed_q);
    const int dim = cfg.p->dim();
    const double span = cfg.p->span();

    switch (cfg.mode) {
        case ExperimentMode::Test: {
            EmdTestConfig tc{dim, span, cfg.eps, cfg.strategy, cfg.c};
            const TestVerdict v = emd_closeness_test(src_p, src_q, tc);
            out.decision = v.decision;
            out.samples_p = v.samples_p;
            out.samples_q = v.samples_q;
            break;
        }
        case ExperimentMode::TestKnown: {
            EmdTestConfig tc{dim, span, cfg.eps, cfg.strategy, cfg.c};
            const TestVerdict v = emd_closeness_test_known(*cfg.q, src_p, tc);
            out.decision = v.decision;
            out.samples_p = v.samples_p;
            out.samples_q = v.samples_q;
            break;
        }
        case ExperimentMode::Estimate: {
            EmdTestConfig tc{dim, span, cfg.eps, cfg.strategy, cfg.c};
            const EstimateReport r = emd_estimate(src_p, src_q, tc);
            out.estimate = r.estimate;
            out.samples_p = r.samples_p;
            out.samples_q = r.samples_q;
            break;
        }
        case ExperimentMode::TestCluster: {
            const TestVerdict v =
                cfg.centers.empty()
                    ? emd_test_clustered_unknown(src_p, src_q, cfg.k, cfg.eps, dim, span,
                                                 cfg.c)
                    : emd_test_clustered_known(src_p, src_q, cfg.centers, cfg.eps, dim,
                                               span, cfg.c);
            out.decision = v.decision;
            out.samples_p = v.samples_p;
            out.samples_q = v.samples_q;
            break;
        }
        case ExperimentMode::Tree: {
            const EstimateReport r =
                tree_emd_estimate(src_p, src_q, *cfg.tree, cfg.eps, cfg.delta, cfg.c);
            out.estimate = r.estimate;
            out.samples_p = r.samples_p;
            out.samples_q = r.samples_q;
            break;
        }
    }
    return out;
}

}  // namespace

TrialReport run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);

    TrialReport report;
    report.trials.resize(static_cast<std::size_t>(cfg.trials));

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = cfg.threads > 0
                                 ? static_cast<unsigned>(cfg.threads)
                                 : std::min<unsigned>(hw, static_cast<unsigned>(cfg.trials));
    if (workers <= 1) {
        for (int t = 0; t < cfg.trials; ++t) {
            report.trials[static_cast<std::size_t>(t)] = run_one_trial(cfg, t);
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        std::exception_ptr first_error;
        std::mutex error_mutex;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int t = static_cast<int>(w); t < cfg.trials;
                         t += static_cast<int>(workers)) {
                        report.trials[static_cast<std::size_t>(t)] = run_one_trial(cfg, t);
                    }
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    double estimate_sum = 0.0;
    bool any_estimate = false;
    for (const auto& tr : report.trials) {
        if (tr.decision) {
            if (*tr.decision == Decision::Accept) ++report.accepts;
            else ++report.rejects;
        }
        if (tr.estimate) {
            estimate_sum += *tr.estimate;
            any_estimate = true;
        }
    }
    if (report.accepts + report.rejects > 0) {
        report.accept_rate = static_cast<double>(report.accepts) /
                             static_cast<double>(report.accepts + report.rejects);
    }
    if (any_estimate) {
        report.mean_estimate = estimate_sum / static_cast<double>(cfg.trials);
    }

    if (cfg.compute_oracle) {
        report.oracle_emd = cfg.mode == ExperimentMode::Tree
                                ? tree_emd_exact(*cfg.tree, *cfg.p, *cfg.q)
                                : emd_exact(*cfg.p, *cfg.q);
    }
    return report;
}

nlohmann::ordered_json report_to_json(const ExperimentConfig& cfg, const TrialReport& report) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(cfg.mode);
    j["rng"] = cfg.rng;
    j["eps"] = cfg.eps;
    j["delta"] = cfg.delta;
    j["trials"] = cfg.trials;
    j["base_seed"] = cfg.base_seed;
    j["c_mult"] = cfg.c;
    j["strategy"] = to_string(cfg.strategy);
    if (!cfg.generator.empty()) j["generator"] = cfg.generator;
    if (cfg.p) {
        j["d"] = cfg.p->dim();
        j["span"] = cfg.p->span();
        j["p"] = distribution_to_json(*cfg.p);
        j["q"] = distribution_to_json(*cfg.q);
    }
    if (cfg.tree) j["tree"] = tree_to_json(*cfg.tree);
    if (!cfg.centers.empty()) j["centers"] = centers_to_json(cfg.centers);
    if (cfg.mode == ExperimentMode::TestCluster && cfg.centers.empty()) j["k"] = cfg.k;
    if (report.oracle_emd) j["oracle_emd"] = *report.oracle_emd;

    auto trials = nlohmann::ordered_json::array();
    for (const auto& tr : report.trials) {
        nlohmann::ordered_json t;
        t["trial"] = tr.trial;
        t["seed_p"] = tr.seed_p;
        t["seed_q"] = tr.seed_q;
        if (tr.decision) t["decision"] = to_string(*tr.decision);
        if (tr.estimate) t["estimate"] = *tr.estimate;
        t["samples_p"] = tr.samples_p;
        t["samples_q"] = tr.samples_q;
        trials.push_back(std::move(t));
    }
    j["results"] = std::move(trials);

    nlohmann::ordered_json agg;
    agg["accepts"] = report.accepts;
    agg["rejects"] = report.rejects;
    agg["accept_rate"] = report.accept_rate;
    if (report.mean_estimate) agg["mean_estimate"] = *report.mean_estimate;
    j["aggregate"] = std::move(agg);
    return j;
}

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::string report_to_csv(const ExperimentConfig& cfg, const TrialReport& report) {
    std::ostringstream out;
    out << "trial,seed_p,seed_q,decision,estimate,samples_p,samples_q\n";
    for (const auto& tr : report.trials) {
        out << tr.trial << ',' << tr.seed_p << ',' << tr.seed_q << ',';
        if (tr.decision) out << to_string(*tr.decision);
        out << ',';
        if (tr.estimate) out << fmt_double(*tr.estimate);
        out << ',' << tr.samples_p << ',' << tr.samples_q << '\n';
    }
    out << "# mode=" << to_string(cfg.mode) << " eps=" << fmt_double(cfg.eps)
        << " accepts=" << report.accepts << " rejects=" << report.rejects
        << " accept_rate=" << fmt_double(report.accept_rate);
    if (report.mean_estimate) out << " mean_estimate=" << fmt_double(*report.mean_estimate);
    if (report.oracle_emd) out << " oracle_emd=" << fmt_double(*report.oracle_emd);
    out << '\n';
    return out.str();
}

}  // namespace emdtest
