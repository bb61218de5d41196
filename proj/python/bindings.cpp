#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "emdtest/cluster_testers.hpp"
#include "emdtest/emd_testers.hpp"
#include "emdtest/exact_emd.hpp"
#include "emdtest/generators.hpp"
#include "emdtest/tree_emd.hpp"

namespace py = pybind11;
using namespace emdtest;

namespace {

using PointsWithWeights = std::vector<std::pair<std::vector<double>, double>>;

DiscreteDistribution make_distribution(const PointsWithWeights& points, int dim, double span) {
    std::vector<std::pair<Point, double>> pw;
    pw.reserve(points.size());
    for (const auto& [coords, w] : points) pw.emplace_back(Point(coords), w);
    return new_distribution(std::move(pw), dim, span);
}

L1Strategy strategy_from(const std::string& s) {
    if (s == "plugin") return L1Strategy::Plugin;
    if (s == "collision") return L1Strategy::Collision;
    if (s == "auto") return L1Strategy::Auto;
    throw ParamError("unknown strategy: " + s);
}

py::dict verdict_dict(const TestVerdict& v) {
    py::dict d;
    d["decision"] = std::string(to_string(v.decision));
    d["accepted"] = v.accepted();
    d["eps"] = v.eps;
    d["delta"] = v.delta;
    d["dim"] = v.dim;
    d["span"] = v.span;
    d["samples_p"] = v.samples_p;
    d["samples_q"] = v.samples_q;
    return d;
}

py::dict estimate_dict(const EstimateReport& r) {
    py::dict d;
    d["estimate"] = r.estimate;
    d["eps"] = r.eps;
    d["delta"] = r.delta;
    d["samples_p"] = r.samples_p;
    d["samples_q"] = r.samples_q;
    d["grid_side"] = r.grid_side;
    d["seed_p"] = r.seed_p;
    d["seed_q"] = r.seed_q;
    return d;
}

std::vector<Point> points_from(const std::vector<std::vector<double>>& coords) {
    std::vector<Point> out;
    out.reserve(coords.size());
    for (const auto& c : coords) out.emplace_back(c);
    return out;
}

std::vector<std::vector<double>> coords_from(const std::vector<Point>& points) {
    std::vector<std::vector<double>> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.coords);
    return out;
}

}  // namespace

PYBIND11_MODULE(_emdtest, m) {
    m.doc() = "Sampling-based Earth Mover's Distance testers and estimators";

    py::register_exception<Error>(m, "EmdError");

    py::class_<DiscreteDistribution>(m, "Distribution")
        .def(py::init(&make_distribution), py::arg("points_with_weights"), py::arg("dim"),
             py::arg("span"))
        .def_property_readonly("dim", &DiscreteDistribution::dim)
        .def_property_readonly("span", &DiscreteDistribution::span)
        .def_property_readonly("support_size", &DiscreteDistribution::support_size)
        .def_property_readonly(
            "points", [](const DiscreteDistribution& d) { return coords_from(d.points()); })
        .def_property_readonly("weights",
                               [](const DiscreteDistribution& d) { return d.weights(); })
        .def("__eq__", [](const DiscreteDistribution& a,
                          const DiscreteDistribution& b) { return a == b; })
        .def("__repr__", [](const DiscreteDistribution& d) {
            return "<Distribution dim=" + std::to_string(d.dim()) +
                   " support=" + std::to_string(d.support_size()) + ">";
        });

    py::class_<WeightedTree>(m, "Tree")
        .def(py::init([](int n, const std::vector<std::tuple<int, int, double>>& edges) {
                 std::vector<TreeEdge> es;
                 es.reserve(edges.size());
                 for (const auto& [u, v, w] : edges) es.push_back({u, v, w});
                 return WeightedTree(n, std::move(es));
             }),
             py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &WeightedTree::node_count)
        .def_property_readonly("max_weight", &WeightedTree::max_weight)
        .def("distance_matrix", &WeightedTree::distance_matrix);

    m.def("line_tree", &line_tree, py::arg("n"));

    m.def("l1_distance",
          py::overload_cast<const DiscreteDistribution&, const DiscreteDistribution&>(
              &l1_distance),
          py::arg("p"), py::arg("q"));

    m.def("emd_exact", &emd_exact, py::arg("p"), py::arg("q"),
          "Exact EMD by minimum-cost flow under the ambient l1 metric.");
    m.def("emd_exact_matrix", &emd_exact_matrix, py::arg("dist"), py::arg("p"), py::arg("q"));
    m.def(
        "emd_bounds",
        [](const DiscreteDistribution& p, const DiscreteDistribution& q) {
            return emd_bounds(p, q);
        },
        py::arg("p"), py::arg("q"), "The l1 sandwich (lower, upper) around the exact EMD.");
    m.def(
        "optimal_flow",
        [](const DiscreteDistribution& p, const DiscreteDistribution& q) {
            const FlowResult r = optimal_flow(p, q);
            py::dict d;
            d["cost"] = r.cost;
            d["flow"] = r.flow;
            return d;
        },
        py::arg("p"), py::arg("q"));

    m.def("coarsening_bound", &coarsening_bound, py::arg("p"), py::arg("q"), py::arg("eps"));
    m.def(
        "coarsen",
        [](const DiscreteDistribution& p, int level) {
            return coarsen(p, level).cells;
        },
        py::arg("p"), py::arg("level"),
        "Sparse cell distribution (linearized cell key -> mass) at the given level.");
    m.def(
        "cell_of",
        [](const std::vector<double>& coords, int level, int dim, double span) {
            return cell_of(Point(coords), level, dim, span).cell;
        },
        py::arg("coords"), py::arg("level"), py::arg("dim"), py::arg("span"));

    m.def(
        "emd_closeness_test",
        [](const DiscreteDistribution& p, const DiscreteDistribution& q, double eps,
           std::uint64_t seed, double c, const std::string& strategy) {
            SampleSource sp(p, seed), sq(q, seed + 1);
            EmdTestConfig cfg{p.dim(), p.span(), eps, strategy_from(strategy), c};
            return verdict_dict(emd_closeness_test(sp, sq, cfg));
        },
        py::arg("p"), py::arg("q"), py::arg("eps"), py::arg("seed") = 1, py::arg("c") = 1.0,
        py::arg("strategy") = "auto",
        "Two-sample closeness test on seeded synthetic sources over p and q.");

    m.def(
        "emd_closeness_test_known",
        [](const DiscreteDistribution& q_known, const DiscreteDistribution& p, double eps,
           std::uint64_t seed, double c) {
            SampleSource sp(p, seed);
            EmdTestConfig cfg{p.dim(), p.span(), eps, L1Strategy::Auto, c};
            return verdict_dict(emd_closeness_test_known(q_known, sp, cfg));
        },
        py::arg("q_known"), py::arg("p"), py::arg("eps"), py::arg("seed") = 1,
        py::arg("c") = 1.0);

    m.def(
        "emd_estimate",
        [](const DiscreteDistribution& p, const DiscreteDistribution& q, double eps,
           std::uint64_t seed, double c) {
            SampleSource sp(p, seed), sq(q, seed + 1);
            EmdTestConfig cfg{p.dim(), p.span(), eps, L1Strategy::Auto, c};
            return estimate_dict(emd_estimate(sp, sq, cfg));
        },
        py::arg("p"), py::arg("q"), py::arg("eps"), py::arg("seed") = 1, py::arg("c") = 1.0,
        "Additive-error EMD estimate from seeded samples of p and q.");

    m.def(
        "assign_to_centers",
        [](const std::vector<double>& coords, const std::vector<std::vector<double>>& centers) {
            return assign_to_centers(Point(coords), points_from(centers));
        },
        py::arg("point"), py::arg("centers"));

    m.def(
        "emd_test_clustered_known",
        [](const DiscreteDistribution& p, const DiscreteDistribution& q,
           const std::vector<std::vector<double>>& centers, double eps, std::uint64_t seed,
           double c) {
            SampleSource sp(p, seed), sq(q, seed + 1);
            return verdict_dict(
                emd_test_clustered_known(sp, sq, points_from(centers), eps, p.dim(),
                                         p.span(), c));
        },
        py::arg("p"), py::arg("q"), py::arg("centers"), py::arg("eps"), py::arg("seed") = 1,
        py::arg("c") = 1.0);

    m.def(
        "emd_test_clustered_unknown",
        [](const DiscreteDistribution& p, const DiscreteDistribution& q, std::size_t k,
           double eps, std::uint64_t seed, double c) {
            SampleSource sp(p, seed), sq(q, seed + 1);
            return verdict_dict(
                emd_test_clustered_unknown(sp, sq, k, eps, p.dim(), p.span(), c));
        },
        py::arg("p"), py::arg("q"), py::arg("k"), py::arg("eps"), py::arg("seed") = 1,
        py::arg("c") = 1.0);

    m.def(
        "find_representatives",
        [](const DiscreteDistribution& p, std::size_t k, double b, double gamma,
           std::uint64_t seed, double c) -> py::object {
            SampleSource src(p, seed);
            auto model = find_representatives(src, k, b, gamma, c);
            if (!model) return py::none();
            py::dict d;
            d["centers"] = coords_from(model->centers);
            d["diameter_bound"] = model->diameter_bound;
            d["unclustered_mass_bound"] = model->unclustered_mass_bound;
            return py::object(d);
        },
        py::arg("p"), py::arg("k"), py::arg("b"), py::arg("gamma"), py::arg("seed") = 1,
        py::arg("c") = 1.0,
        "Greedy representative scan; None means far from clusterable.");

    m.def("tree_emd_exact", &tree_emd_exact, py::arg("tree"), py::arg("p"), py::arg("q"),
          "Exact tree EMD via the edge-cut formula.");
    m.def(
        "tree_emd_estimate",
        [](const DiscreteDistribution& p, const DiscreteDistribution& q,
           const WeightedTree& tree, double eps, double delta, std::uint64_t seed, double c) {
            SampleSource sp(p, seed), sq(q, seed + 1);
            return estimate_dict(tree_emd_estimate(sp, sq, tree, eps, delta, c));
        },
        py::arg("p"), py::arg("q"), py::arg("tree"), py::arg("eps"),
        py::arg("delta") = 1.0 / 3.0, py::arg("seed") = 1, py::arg("c") = 1.0);
    m.def("hard_line_instance", &hard_line_instance, py::arg("n"), py::arg("eps"));

    m.def("gen_hard_pair_1d", &gen_hard_pair_1d, py::arg("span"), py::arg("eps"));
    m.def("gen_grid_injection", &gen_grid_injection, py::arg("p_abstract"),
          py::arg("q_abstract"), py::arg("n"), py::arg("dim"), py::arg("span"));
    m.def(
        "gen_clustered",
        [](std::size_t k, double b, int dim, double span, double imbalance) {
            auto planted = gen_clustered(k, b, dim, span, imbalance);
            py::dict d;
            d["p"] = planted.p;
            d["q"] = planted.q;
            d["centers"] = coords_from(planted.centers);
            return d;
        },
        py::arg("k"), py::arg("b"), py::arg("dim"), py::arg("span"), py::arg("imbalance"));

    // budget formulas, for determinism checks from python
    m.def("budget_collision", &budget_collision);
    m.def("budget_plugin", &budget_plugin);
    m.def("budget_known", &budget_known);
    m.def("budget_emd_approx", &budget_emd_approx);
    m.def("budget_tree_estimate", &budget_tree_estimate);
    m.def("budget_representatives", &budget_representatives);

#ifdef EMDTEST_VERSION
    m.attr("__version__") = EMDTEST_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
