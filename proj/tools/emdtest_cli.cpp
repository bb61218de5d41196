// Experiment runner: seeded trial batteries for the EMD testers and
// estimators plus the adversarial instance generators, with JSON/CSV
// reports. See README for the file formats.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "emdtest/exact_emd.hpp"
#include "emdtest/experiment.hpp"
#include "emdtest/generators.hpp"
#include "emdtest/io.hpp"

using namespace emdtest;

namespace {

constexpr int kExitParam = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitInternal = 5;

struct CommonOpts {
    std::string in_path;
    std::string p_path;
    std::string q_path;
    std::string tree_path;
    std::string centers_path;
    std::string out_path;
    std::string format = "json";
    double eps = 0.25;
    double delta = 1.0 / 3.0;
    int trials = 1;
    std::uint64_t seed = 1;
    double c_mult = 1.0;
    std::size_t k = 0;
    int threads = 0;
    std::string strategy = "auto";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool wants_eps = true) {
    cmd->add_option("--in", opts.in_path, "instance bundle (gen output)");
    cmd->add_option("--p", opts.p_path, "distribution file for p");
    cmd->add_option("--q", opts.q_path, "distribution file for q");
    if (wants_eps) cmd->add_option("--eps", opts.eps, "distance parameter");
    cmd->add_option("--delta", opts.delta, "failure probability (tree estimator)");
    cmd->add_option("--trials", opts.trials, "independent seeded trials");
    cmd->add_option("--seed", opts.seed, "base seed; trial t uses base+2t, base+2t+1");
    cmd->add_option("--c-mult", opts.c_mult, "budget multiplier c");
    cmd->add_option("--threads", opts.threads, "trial pool size (0 = hardware)");
    cmd->add_option("--out", opts.out_path, "output path (stdout when omitted)");
    cmd->add_option("--format", opts.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

L1Strategy parse_strategy(const std::string& s) {
    if (s == "plugin") return L1Strategy::Plugin;
    if (s == "collision") return L1Strategy::Collision;
    if (s == "auto") return L1Strategy::Auto;
    throw ParamError("unknown strategy: " + s);
}

// Loads p, q (and optionally tree/centers/generator echo) into the config.
void load_instance(const CommonOpts& opts, ExperimentConfig& cfg) {
    if (!opts.in_path.empty()) {
        if (!opts.p_path.empty() || !opts.q_path.empty()) {
            throw ParamError("--in and --p/--q are mutually exclusive");
        }
        const auto bundle = load_json_file(opts.in_path);
        if (!bundle.contains("p") || !bundle.contains("q")) {
            throw ParseError("bundle needs 'p' and 'q' distributions");
        }
        cfg.p = distribution_from_json(bundle["p"]);
        cfg.q = distribution_from_json(bundle["q"]);
        if (bundle.contains("tree")) cfg.tree = tree_from_json(bundle["tree"]);
        if (bundle.contains("centers")) {
            cfg.centers = centers_from_json(bundle["centers"], cfg.p->dim());
        }
        if (bundle.contains("generator")) cfg.generator = bundle["generator"];
        return;
    }
    if (opts.p_path.empty() || opts.q_path.empty()) {
        throw ParamError("need --in or both --p and --q");
    }
    cfg.p = distribution_from_json(load_json_file(opts.p_path));
    cfg.q = distribution_from_json(load_json_file(opts.q_path));
}

void emit(const CommonOpts& opts, const ExperimentConfig& cfg, const TrialReport& report) {
    const std::string text = opts.format == "csv"
                                 ? report_to_csv(cfg, report)
                                 : report_to_json(cfg, report).dump(2) + "\n";
    if (opts.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_text_file(opts.out_path, text);
    }
}

int run_mode(ExperimentMode mode, const CommonOpts& opts) {
    ExperimentConfig cfg;
    cfg.mode = mode;
    cfg.eps = opts.eps;
    cfg.delta = opts.delta;
    cfg.trials = opts.trials;
    cfg.base_seed = opts.seed;
    cfg.c = opts.c_mult;
    cfg.k = opts.k;
    cfg.threads = opts.threads;
    cfg.strategy = parse_strategy(opts.strategy);
    load_instance(opts, cfg);
    if (mode == ExperimentMode::Tree && !opts.tree_path.empty()) {
        cfg.tree = tree_from_json(load_json_file(opts.tree_path));
    }
    if (mode == ExperimentMode::TestCluster && !opts.centers_path.empty()) {
        cfg.centers = centers_from_json(load_json_file(opts.centers_path), cfg.p->dim());
    }
    emit(opts, cfg, run_experiment(cfg));
    return 0;
}

struct GenOpts {
    std::string generator;
    std::string out_path;
    double span = 1.0;
    int dim = 1;
    double eps = 0.1;       // hard-pair gap / hard-line gap
    double diameter = 0.1;  // cluster diameter b
    std::size_t clusters = 2;
    double imbalance = 0.0;
    std::size_t n = 16;     // abstract size (grid-injection) or line nodes
    std::uint64_t seed = 1;
};

int run_gen(const GenOpts& opts) {
    nlohmann::ordered_json bundle;
    bundle["generator"] = opts.generator;

    auto put_pair = [&](const DiscreteDistribution& p, const DiscreteDistribution& q) {
        bundle["d"] = p.dim();
        bundle["delta"] = p.span();
        bundle["p"] = distribution_to_json(p);
        bundle["q"] = distribution_to_json(q);
    };

    if (opts.generator == "hard-pair-1d") {
        auto [p, q] = gen_hard_pair_1d(opts.span, opts.eps);
        put_pair(p, q);
        bundle["oracle_emd"] = emd_exact(p, q);
    } else if (opts.generator == "grid-injection") {
        // random abstract pair over [n] at l1 distance ~1, seeded
        Rng rng(opts.seed);
        std::vector<double> pa(opts.n, 1.0 / static_cast<double>(opts.n));
        std::vector<double> qa(opts.n, 0.0);
        for (std::size_t i = 0; i < opts.n; ++i) {
            qa[i] = (i < opts.n / 2) ? 2.0 / static_cast<double>(opts.n) : 0.0;
        }
        auto [p, q] = gen_grid_injection(pa, qa, opts.n, opts.dim, opts.span);
        put_pair(p, q);
        bundle["oracle_emd"] = emd_exact(p, q);
        bundle["pitch"] = grid_injection_pitch(opts.n, opts.dim, opts.span);
    } else if (opts.generator == "clustered") {
        auto planted = gen_clustered(opts.clusters, opts.diameter, opts.dim, opts.span,
                                     opts.imbalance);
        put_pair(planted.p, planted.q);
        bundle["oracle_emd"] = emd_exact(planted.p, planted.q);
        bundle["centers"] = centers_to_json(planted.centers);
    } else if (opts.generator == "hard-line") {
        auto [p, q] = hard_line_instance(static_cast<int>(opts.n), opts.eps);
        const WeightedTree tree = line_tree(static_cast<int>(opts.n));
        put_pair(p, q);
        bundle["tree"] = tree_to_json(tree);
        bundle["oracle_emd"] = tree_emd_exact(tree, p, q);
    } else {
        throw ParamError("unknown generator: " + opts.generator +
                         " (hard-pair-1d, grid-injection, clustered, hard-line)");
    }

    const std::string text = bundle.dump(2) + "\n";
    if (opts.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_text_file(opts.out_path, text);
    }
    return 0;
}

struct BenchOpts {
    CommonOpts common;
    std::string bench_mode = "test";
    std::vector<double> gaps = {0.0, 0.1, 0.2};
};

int run_bench(const BenchOpts& opts) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::string csv = "gap,oracle_emd,trials,accepts,rejects,accept_rate,mean_estimate\n";
    for (double gap : opts.gaps) {
        ExperimentConfig cfg;
        cfg.mode = opts.bench_mode == "estimate" ? ExperimentMode::Estimate
                                                 : ExperimentMode::Test;
        auto [p, q] = gen_hard_pair_1d(1.0, gap);
        cfg.p = p;
        cfg.q = q;
        cfg.eps = opts.common.eps;
        cfg.trials = opts.common.trials;
        cfg.base_seed = opts.common.seed;
        cfg.c = opts.common.c_mult;
        cfg.threads = opts.common.threads;
        cfg.generator = "hard-pair-1d";
        const TrialReport report = run_experiment(cfg);

        nlohmann::ordered_json row;
        row["gap"] = gap;
        row["oracle_emd"] = *report.oracle_emd;
        row["trials"] = cfg.trials;
        row["accepts"] = report.accepts;
        row["rejects"] = report.rejects;
        row["accept_rate"] = report.accept_rate;
        if (report.mean_estimate) row["mean_estimate"] = *report.mean_estimate;
        rows.push_back(std::move(row));

        char line[256];
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%d,%llu,%llu,%.17g,", gap,
                      *report.oracle_emd, cfg.trials,
                      static_cast<unsigned long long>(report.accepts),
                      static_cast<unsigned long long>(report.rejects), report.accept_rate);
        csv += line;
        if (report.mean_estimate) {
            std::snprintf(line, sizeof(line), "%.17g", *report.mean_estimate);
            csv += line;
        }
        csv += '\n';
    }
    const std::string text =
        opts.common.format == "csv" ? csv : rows.dump(2) + "\n";
    if (opts.common.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_text_file(opts.common.out_path, text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sampling-based EMD testers and estimators"};
    app.require_subcommand(1);

    CommonOpts estimate_opts, test_opts, known_opts, cluster_opts, tree_opts;
    GenOpts gen_opts;
    BenchOpts bench_opts;

    auto* cmd_estimate = app.add_subcommand("estimate", "additive-error EMD estimate");
    add_common(cmd_estimate, estimate_opts);

    auto* cmd_test = app.add_subcommand("test", "two-sample EMD closeness test");
    add_common(cmd_test, test_opts);
    cmd_test->add_option("--strategy", test_opts.strategy, "plugin|collision|auto");

    auto* cmd_known = app.add_subcommand("test-known", "closeness test, q known exactly");
    add_common(cmd_known, known_opts);

    auto* cmd_cluster = app.add_subcommand("test-cluster", "clusterable-support test");
    add_common(cmd_cluster, cluster_opts);
    cmd_cluster->add_option("--centers", cluster_opts.centers_path,
                            "JSON list of centers (known-centers mode)");
    cmd_cluster->add_option("--k", cluster_opts.k, "cluster count (unknown-centers mode)");

    auto* cmd_tree = app.add_subcommand("tree-emd", "tree-metric EMD estimate");
    add_common(cmd_tree, tree_opts);
    cmd_tree->add_option("--tree", tree_opts.tree_path, "tree file");

    auto* cmd_gen = app.add_subcommand("gen", "write an instance bundle");
    cmd_gen->add_option("--generator", gen_opts.generator,
                        "hard-pair-1d|grid-injection|clustered|hard-line")
        ->required();
    cmd_gen->add_option("--span", gen_opts.span, "domain span (Delta)");
    cmd_gen->add_option("--dim", gen_opts.dim, "dimension d");
    cmd_gen->add_option("--eps", gen_opts.eps, "EMD gap for the hard instances");
    cmd_gen->add_option("--diameter", gen_opts.diameter, "cluster diameter b");
    cmd_gen->add_option("--clusters", gen_opts.clusters, "cluster count k");
    cmd_gen->add_option("--imbalance", gen_opts.imbalance, "cross-cluster mass shift");
    cmd_gen->add_option("--n", gen_opts.n, "abstract size / line nodes");
    cmd_gen->add_option("--seed", gen_opts.seed, "generator seed");
    cmd_gen->add_option("--out", gen_opts.out_path, "output path");

    auto* cmd_bench = app.add_subcommand("bench", "accept-rate sweep over EMD gaps");
    add_common(cmd_bench, bench_opts.common);
    cmd_bench->add_option("--bench-mode", bench_opts.bench_mode, "test|estimate");
    cmd_bench->add_option("--gap-list", bench_opts.gaps, "EMD gaps to sweep")
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_estimate->parsed()) return run_mode(ExperimentMode::Estimate, estimate_opts);
        if (cmd_test->parsed()) return run_mode(ExperimentMode::Test, test_opts);
        if (cmd_known->parsed()) return run_mode(ExperimentMode::TestKnown, known_opts);
        if (cmd_cluster->parsed()) return run_mode(ExperimentMode::TestCluster, cluster_opts);
        if (cmd_tree->parsed()) return run_mode(ExperimentMode::Tree, tree_opts);
        if (cmd_gen->parsed()) return run_gen(gen_opts);
        if (cmd_bench->parsed()) return run_bench(bench_opts);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ParamError& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitParam;
    } catch (const ConfigError& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitParam;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
