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

#include <algorithm>

#include "treeprep/model_io.hpp"
#include "treeprep/qrf.hpp"
#include "treeprep/rng.hpp"

using namespace treeprep;

TEST_CASE("constant responses make every quantile the constant") {
    const std::vector<std::vector<double>> X{{0.0}, {1.0}, {2.0}, {3.0}};
    const std::vector<double> y{0.4, 0.4, 0.4, 0.4};
    const auto forest = fit_qrf(X, y, QrfParams{}, 1);
    for (double q : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        CHECK(forest.quantile(q, std::vector<double>{1.5}) == 0.4);
    }
}

TEST_CASE("quantiles are monotone in the level") {
    Rng rng(8);
    std::vector<std::vector<double>> X(40, std::vector<double>(2));
    std::vector<double> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        X[i][0] = rng.uniform(0.0, kTwoPi);
        X[i][1] = rng.uniform(0.0, kTwoPi);
        y[i] = rng.uniform();
    }
    const auto forest = fit_qrf(X, y, QrfParams{}, 5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        const double q10 = forest.quantile(0.1, x);
        const double q50 = forest.quantile(0.5, x);
        const double q90 = forest.quantile(0.9, x);
        CHECK(q10 <= q50);
        CHECK(q50 <= q90);
    }
}

TEST_CASE("pooled quantiles match a brute-force pooling recomputation") {
    Rng rng(15);
    std::vector<std::vector<double>> X(10, std::vector<double>(1));
    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        X[i][0] = rng.uniform(0.0, kTwoPi);
        y[i] = rng.uniform();
    }
    const auto forest = fit_qrf(X, y, QrfParams{5, TreeParams{4, 1, true}}, 3);

    const std::vector<double> probe{1.0};
    // Independent pooling: walk each tree's leaf directly.
    std::vector<double> pool;
    for (const auto& tree : forest.trees()) {
        const auto& leaf = tree.leaf(probe);
        pool.insert(pool.end(), leaf.samples.begin(), leaf.samples.end());
    }
    std::sort(pool.begin(), pool.end());
    REQUIRE_FALSE(pool.empty());
    for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double h = q * static_cast<double>(pool.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const std::size_t hi = std::min(lo + 1, pool.size() - 1);
        const double expected = pool[lo] + (h - lo) * (pool[hi] - pool[lo]);
        CHECK(forest.quantile(q, probe) == expected);
    }
}

TEST_CASE("forests are deterministic per seed") {
    Rng rng(77);
    std::vector<std::vector<double>> X(20, std::vector<double>(1));
    std::vector<double> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
        X[i][0] = rng.uniform(0.0, kTwoPi);
        y[i] = rng.uniform();
    }
    const auto a = fit_qrf(X, y, QrfParams{}, 9);
    const auto b = fit_qrf(X, y, QrfParams{}, 9);
    const auto c = fit_qrf(X, y, QrfParams{}, 10);
    const std::vector<double> x{2.0};
    CHECK(a.predict(x) == b.predict(x));
    CHECK(a.pooled_samples(x) == b.pooled_samples(x));
    CHECK(a.predict(x) != c.predict(x));
}

TEST_CASE("qrf preconditions") {
    CHECK_THROWS_AS(fit_qrf({{0.0}}, {1.0}, QrfParams{}, 1), std::invalid_argument);
    CHECK_THROWS_AS(fit_qrf({{0.0}, {1.0}}, {1.0, 2.0}, QrfParams{0, TreeParams{}}, 1),
                    std::invalid_argument);
    const auto forest = fit_qrf({{0.0}, {1.0}}, {0.0, 1.0}, QrfParams{}, 1);
    CHECK_THROWS_AS(forest.quantile(1.5, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("qrf serialization round-trips") {
    Rng rng(3);
    std::vector<std::vector<double>> X(15, std::vector<double>(2));
    std::vector<double> y(15);
    for (std::size_t i = 0; i < 15; ++i) {
        X[i][0] = rng.uniform(0.0, kTwoPi);
        X[i][1] = rng.uniform(0.0, kTwoPi);
        y[i] = rng.uniform();
    }
    const auto forest = fit_qrf(X, y, QrfParams{10, TreeParams{5, 1, true}}, 2);
    const auto loaded = qrf_from_json(model_to_json(forest));
    const std::vector<double> x{0.5, 4.0};
    CHECK(loaded.pooled_samples(x) == forest.pooled_samples(x));
    CHECK(loaded.quantile(0.5, x) == forest.quantile(0.5, x));
}
