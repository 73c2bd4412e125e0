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

#include <catch2/catch_amalgamated.hpp>

#include "treeprep/rng.hpp"
#include "treeprep/tree.hpp"

using namespace treeprep;

namespace {

double training_sse(const RegressionTree& tree, const std::vector<std::vector<double>>& X,
                    const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double diff = y[i] - tree.predict(X[i]);
        acc += diff * diff;
    }
    return acc;
}

/// Exhaustive single-split oracle: tries every (feature, midpoint) split
/// and returns the smallest achievable SSE with leaf-mean predictions.
double best_single_split_sse(const std::vector<std::vector<double>>& X,
                             const std::vector<double>& y) {
    const std::size_t n = X.size();
    const std::size_t n_features = X[0].size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < n_features; ++f) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (X[a][f] >= X[b][f]) {
                    continue;
                }
                const double thr = X[a][f] + (X[b][f] - X[a][f]) / 2.0;
                double sum_l = 0.0, sum_r = 0.0;
                std::size_t n_l = 0, n_r = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (X[i][f] <= thr) {
                        sum_l += y[i];
                        ++n_l;
                    } else {
                        sum_r += y[i];
                        ++n_r;
                    }
                }
                if (n_l == 0 || n_r == 0) {
                    continue;
                }
                const double mean_l = sum_l / static_cast<double>(n_l);
                const double mean_r = sum_r / static_cast<double>(n_r);
                double sse = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double mean = X[i][f] <= thr ? mean_l : mean_r;
                    sse += (y[i] - mean) * (y[i] - mean);
                }
                best = std::min(best, sse);
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("constant residuals produce a single leaf") {
    const std::vector<std::vector<double>> X{{0.0}, {1.0}, {2.0}, {3.0}};
    const std::vector<double> y{0.7, 0.7, 0.7, 0.7};
    const auto tree = fit_tree(X, y, TreeParams{5, 1, false});
    REQUIRE(tree.nodes().size() == 1);
    CHECK(tree.nodes()[0].feature == -1);
    CHECK(tree.nodes()[0].value == 0.7);
    CHECK(tree.nodes()[0].count == 4);
}

TEST_CASE("two separable points split at the midpoint") {
    const std::vector<std::vector<double>> X{{0.0}, {1.0}};
    const std::vector<double> y{-1.0, 1.0};
    const auto tree = fit_tree(X, y, TreeParams{3, 1, false});
    REQUIRE(tree.nodes().size() == 3);
    CHECK(tree.nodes()[0].feature == 0);
    CHECK(tree.nodes()[0].threshold == 0.5);
    CHECK(tree.predict(std::vector<double>{0.0}) == -1.0);
    CHECK(tree.predict(std::vector<double>{1.0}) == 1.0);
    CHECK(tree.predict(std::vector<double>{0.49}) == -1.0);
}

TEST_CASE("greedy depth-3 fit beats every single-split alternative") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::vector<double>> X(20, std::vector<double>(2));
        std::vector<double> y(20);
        for (std::size_t i = 0; i < 20; ++i) {
            X[i][0] = rng.uniform();
            X[i][1] = rng.uniform();
            y[i] = rng.uniform(-1.0, 1.0);
        }
        const auto tree = fit_tree(X, y, TreeParams{3, 1, false});
        CHECK(training_sse(tree, X, y) <= best_single_split_sse(X, y) + 1e-12);
    }
}

TEST_CASE("min_samples_leaf caps leaf sizes") {
    Rng rng(29);
    std::vector<std::vector<double>> X(30, std::vector<double>(1));
    std::vector<double> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
        X[i][0] = rng.uniform();
        y[i] = rng.uniform();
    }
    const auto tree = fit_tree(X, y, TreeParams{8, 5, false});
    for (const auto& node : tree.nodes()) {
        if (node.feature < 0) {
            CHECK(node.count >= 5);
        }
    }
}

TEST_CASE("identical inputs give bit-identical trees") {
    Rng rng(4);
    std::vector<std::vector<double>> X(25, std::vector<double>(3));
    std::vector<double> y(25);
    for (std::size_t i = 0; i < 25; ++i) {
        for (auto& v : X[i]) {
            v = rng.uniform();
        }
        y[i] = rng.uniform();
    }
    const auto a = fit_tree(X, y, TreeParams{4, 1, false});
    const auto b = fit_tree(X, y, TreeParams{4, 1, false});
    REQUIRE(a.nodes().size() == b.nodes().size());
    for (std::size_t i = 0; i < a.nodes().size(); ++i) {
        CHECK(a.nodes()[i].feature == b.nodes()[i].feature);
        CHECK(a.nodes()[i].threshold == b.nodes()[i].threshold);
        CHECK(a.nodes()[i].value == b.nodes()[i].value);
    }
}

TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(fit_tree({}, {}, TreeParams{}), std::invalid_argument);
    CHECK_THROWS_AS(fit_tree({{0.0}}, {1.0}, TreeParams{3, 0, false}), std::invalid_argument);

    // Identical features with different responses cannot be split.
    const auto tree = fit_tree({{1.0}, {1.0}}, {0.0, 1.0}, TreeParams{3, 1, false});
    REQUIRE(tree.nodes().size() == 1);
    CHECK(tree.nodes()[0].value == 0.5);
}

TEST_CASE("an empty leaf predicts zero") {
    std::vector<RegressionTree::Node> nodes(1);
    nodes[0].feature = -1;
    nodes[0].count = 0;
    nodes[0].value = 0.0;
    const RegressionTree tree(std::move(nodes));
    CHECK(tree.predict(std::vector<double>{1.0, 2.0}) == 0.0);

    std::vector<RegressionTree::Node> bad(1);
    bad[0].feature = -1;
    bad[0].count = 0;
    bad[0].value = 0.5;
    CHECK_THROWS_AS(RegressionTree(std::move(bad)), std::invalid_argument);
}
