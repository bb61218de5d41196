#include "emdtest/io.hpp"

#include <fstream>
#include <sstream>

namespace emdtest {

namespace {

double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ParseError(std::string("missing numeric field '") + key + "'");
    }
    return j[key].get<double>();
}

}  // namespace

nlohmann::ordered_json distribution_to_json(const DiscreteDistribution& dist) {
    nlohmann::ordered_json j;
    j["d"] = dist.dim();
    j["delta"] = dist.span();
    auto points = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < dist.support_size(); ++i) {
        nlohmann::ordered_json entry;
        entry["coords"] = dist.point(i).coords;
        entry["w"] = dist.weight(i);
        points.push_back(std::move(entry));
    }
    j["points"] = std::move(points);
    return j;
}

DiscreteDistribution distribution_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("distribution: expected an object");
    const int dim = static_cast<int>(require_number(j, "d"));
    const double span = require_number(j, "delta");
    if (!j.contains("points") || !j["points"].is_array()) {
        throw ParseError("distribution: missing 'points' array");
    }
    std::vector<std::pair<Point, double>> pw;
    for (const auto& entry : j["points"]) {
        if (!entry.contains("coords") || !entry["coords"].is_array()) {
            throw ParseError("distribution point: missing 'coords'");
        }
        Point pt;
        for (const auto& c : entry["coords"]) {
            if (!c.is_number()) throw ParseError("coords must be numbers");
            pt.coords.push_back(c.get<double>());
        }
        pw.emplace_back(std::move(pt), require_number(entry, "w"));
    }
    try {
        return new_distribution(std::move(pw), dim, span);
    } catch (const Error& e) {
        throw ParseError(std::string("invalid distribution: ") + e.what());
    }
}

nlohmann::ordered_json tree_to_json(const WeightedTree& tree) {
    nlohmann::ordered_json j;
    j["n"] = tree.node_count();
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [u, v, w] : tree.edges()) {
        nlohmann::ordered_json e;
        e["u"] = u;
        e["v"] = v;
        e["w"] = w;
        edges.push_back(std::move(e));
    }
    j["edges"] = std::move(edges);
    return j;
}

WeightedTree tree_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("tree: expected an object");
    const int n = static_cast<int>(require_number(j, "n"));
    if (!j.contains("edges") || !j["edges"].is_array()) {
        throw ParseError("tree: missing 'edges' array");
    }
    std::vector<TreeEdge> edges;
    for (const auto& e : j["edges"]) {
        edges.push_back(TreeEdge{static_cast<int>(require_number(e, "u")),
                                 static_cast<int>(require_number(e, "v")),
                                 require_number(e, "w")});
    }
    try {
        return WeightedTree(n, std::move(edges));
    } catch (const Error& err) {
        throw ParseError(std::string("invalid tree: ") + err.what());
    }
}

MatrixInstance matrix_instance_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dist") || !j.contains("p") || !j.contains("q")) {
        throw ParseError("matrix instance needs 'dist', 'p' and 'q'");
    }
    MatrixInstance inst;
    for (const auto& row : j["dist"]) {
        inst.dist.emplace_back();
        for (const auto& c : row) inst.dist.back().push_back(c.get<double>());
    }
    for (const auto& w : j["p"]) inst.p.push_back(w.get<double>());
    for (const auto& w : j["q"]) inst.q.push_back(w.get<double>());
    return inst;
}

std::vector<Point> centers_from_json(const nlohmann::json& j, int dim) {
    if (!j.is_array()) throw ParseError("centers: expected an array of coord arrays");
    std::vector<Point> centers;
    for (const auto& entry : j) {
        if (!entry.is_array()) throw ParseError("center must be a coord array");
        Point pt;
        for (const auto& c : entry) pt.coords.push_back(c.get<double>());
        if (static_cast<int>(pt.dim()) != dim) {
            throw ParseError("center dimension mismatch");
        }
        centers.push_back(std::move(pt));
    }
    if (centers.empty()) throw ParseError("centers array is empty");
    return centers;
}

nlohmann::ordered_json centers_to_json(const std::vector<Point>& centers) {
    auto j = nlohmann::ordered_json::array();
    for (const auto& c : centers) j.push_back(c.coords);
    return j;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace emdtest
