#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "emdtest/distribution.hpp"
#include "emdtest/tree_emd.hpp"

namespace emdtest {

// Distribution file: { "d": int, "delta": number,
//                      "points": [ { "coords": [number...], "w": number } ] }
nlohmann::ordered_json distribution_to_json(const DiscreteDistribution& dist);
DiscreteDistribution distribution_from_json(const nlohmann::json& j);

// Tree file: { "n": int, "edges": [ { "u": int, "v": int, "w": number } ] }
nlohmann::ordered_json tree_to_json(const WeightedTree& tree);
WeightedTree tree_from_json(const nlohmann::json& j);

// Explicit-metric instance: { "dist": [[...]], "p": [...], "q": [...] }
struct MatrixInstance {
    std::vector<std::vector<double>> dist;
    std::vector<double> p;
    std::vector<double> q;
};
MatrixInstance matrix_instance_from_json(const nlohmann::json& j);

// Centers file for the known-centers cluster tester: [ [coords...], ... ]
std::vector<Point> centers_from_json(const nlohmann::json& j, int dim);
nlohmann::ordered_json centers_to_json(const std::vector<Point>& centers);

/// Reads a whole file; throws IoError / ParseError.
nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace emdtest
