// Copyright 2026 The treeprep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Versioned text serialization for fitted surrogates, so a checkpointed
// model reloads with bit-identical predictions (doubles round-trip through
// the shortest-representation JSON encoding).

#include <fstream>
#include <string>

#include <json.hpp>

#include "treeprep/common.hpp"
#include "treeprep/gbrt.hpp"
#include "treeprep/qrf.hpp"

namespace treeprep {

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json tree_to_json(const RegressionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes()) {
        nlohmann::json node{{"feature", n.feature}, {"value", n.value}, {"count", n.count}};
        if (n.feature >= 0) {
            node["threshold"] = n.threshold;
            node["left"] = n.left;
            node["right"] = n.right;
        }
        if (!n.samples.empty()) {
            node["samples"] = n.samples;
        }
        nodes.push_back(std::move(node));
    }
    return nlohmann::json{{"nodes", std::move(nodes)}};
}

inline RegressionTree tree_from_json(const nlohmann::json& obj) {
    std::vector<RegressionTree::Node> nodes;
    for (const auto& item : obj.at("nodes")) {
        RegressionTree::Node n;
        n.feature = item.at("feature").get<int>();
        n.value = item.at("value").get<double>();
        n.count = item.at("count").get<int>();
        if (n.feature >= 0) {
            n.threshold = item.at("threshold").get<double>();
            n.left = item.at("left").get<int>();
            n.right = item.at("right").get<int>();
        }
        if (item.contains("samples")) {
            n.samples = item.at("samples").get<std::vector<double>>();
        }
        nodes.push_back(std::move(n));
    }
    return RegressionTree(std::move(nodes));
}

inline nlohmann::json model_to_json(const BoostedEnsemble& model) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : model.trees()) {
        trees.push_back(tree_to_json(t));
    }
    return nlohmann::json{{"format_version", kModelFormatVersion},
                          {"model", "gbrt"},
                          {"base", model.base()},
                          {"shrinkage", model.shrinkage()},
                          {"dimension", model.dimension()},
                          {"trees", std::move(trees)}};
}

inline nlohmann::json model_to_json(const QuantileForest& model) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : model.trees()) {
        trees.push_back(tree_to_json(t));
    }
    return nlohmann::json{{"format_version", kModelFormatVersion},
                          {"model", "qrf"},
                          {"dimension", model.dimension()},
                          {"trees", std::move(trees)}};
}

namespace detail {

inline void check_model_header(const nlohmann::json& obj, const std::string& expected) {
    const int version = obj.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
        throw config_error("model file format_version " + std::to_string(version) +
                           " is not supported");
    }
    const std::string kind = obj.at("model").get<std::string>();
    if (kind != expected) {
        throw config_error("model file holds a '" + kind + "' model, expected '" + expected +
                           "'");
    }
}

}  // namespace detail

inline BoostedEnsemble gbrt_from_json(const nlohmann::json& obj) {
    detail::check_model_header(obj, "gbrt");
    std::vector<RegressionTree> trees;
    for (const auto& t : obj.at("trees")) {
        trees.push_back(tree_from_json(t));
    }
    return BoostedEnsemble(obj.at("base").get<double>(), obj.at("shrinkage").get<double>(),
                           obj.at("dimension").get<std::size_t>(), std::move(trees));
}

inline QuantileForest qrf_from_json(const nlohmann::json& obj) {
    detail::check_model_header(obj, "qrf");
    std::vector<RegressionTree> trees;
    for (const auto& t : obj.at("trees")) {
        trees.push_back(tree_from_json(t));
    }
    return QuantileForest(obj.at("dimension").get<std::size_t>(), std::move(trees));
}

template <class Model>
void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write model file '" + path + "'");
    }
    out << model_to_json(model).dump(2) << "\n";
}

inline nlohmann::json load_model_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file '" + path + "'");
    }
    nlohmann::json obj;
    in >> obj;
    return obj;
}

}  // namespace treeprep
