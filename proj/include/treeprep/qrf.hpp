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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "treeprep/dataset.hpp"
#include "treeprep/gbrt.hpp"
#include "treeprep/rng.hpp"
#include "treeprep/tree.hpp"

namespace treeprep {

struct QrfParams {
    int n_trees = 50;
    TreeParams tree{8, 2, true};
};

/// Quantile regression forest baseline: bagged trees whose leaves retain
/// their training responses. Predictions pool the leaf samples of all
/// trees; quantiles are empirical quantiles of the pool.
class QuantileForest {
  public:
    QuantileForest() = default;
    QuantileForest(std::size_t dimension, std::vector<RegressionTree> trees)
        : dimension_(dimension), trees_(std::move(trees)) {
        if (trees_.empty()) {
            throw std::invalid_argument("QuantileForest needs at least one tree");
        }
    }

    std::size_t dimension() const { return dimension_; }
    std::size_t n_trees() const { return trees_.size(); }
    const std::vector<RegressionTree>& trees() const { return trees_; }

    /// Leaf responses of every tree at x, concatenated in tree order.
    std::vector<double> pooled_samples(std::span<const double> x) const {
        check_dim(x);
        std::vector<double> pool;
        for (const RegressionTree& t : trees_) {
            const auto& leaf = t.leaf(x);
            pool.insert(pool.end(), leaf.samples.begin(), leaf.samples.end());
        }
        return pool;
    }

    /// Empirical q-quantile of the pooled leaf samples (linear
    /// interpolation between order statistics).
    double quantile(double q, std::span<const double> x) const {
        if (q < 0.0 || q > 1.0) {
            throw std::invalid_argument("quantile level must lie in [0, 1]");
        }
        std::vector<double> pool = pooled_samples(x);
        if (pool.empty()) {
            return 0.0;
        }
        std::sort(pool.begin(), pool.end());
        const double h = q * static_cast<double>(pool.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const std::size_t hi = std::min(lo + 1, pool.size() - 1);
        const double frac = h - static_cast<double>(lo);
        return pool[lo] + frac * (pool[hi] - pool[lo]);
    }

    double predict(std::span<const double> x) const {
        const std::vector<double> pool = pooled_samples(x);
        if (pool.empty()) {
            return 0.0;
        }
        double acc = 0.0;
        for (double v : pool) {
            acc += v;
        }
        return acc / static_cast<double>(pool.size());
    }

    /// Mean and standard deviation of the pooled leaf samples. No variance
    /// floor: leaves always retain at least one sample, and the bagged
    /// trees disagree away from data.
    UncertainPrediction predict_uncertain_raw(std::span<const double> x) const {
        const std::vector<double> pool = pooled_samples(x);
        UncertainPrediction out;
        if (pool.empty()) {
            return out;
        }
        double mean = 0.0;
        for (double v : pool) {
            mean += v;
        }
        mean /= static_cast<double>(pool.size());
        double var = 0.0;
        for (double v : pool) {
            var += (v - mean) * (v - mean);
        }
        var /= static_cast<double>(pool.size());
        out.mean = mean;
        out.std = std::sqrt(var);
        return out;
    }

  private:
    void check_dim(std::span<const double> x) const {
        if (x.size() != dimension_) {
            throw std::invalid_argument("QuantileForest: input dimension mismatch");
        }
    }

    std::size_t dimension_ = 0;
    std::vector<RegressionTree> trees_;
};

/// Fits the forest on bootstrap resamples of (X, y); tree m's resample is
/// drawn from a stream derived from (seed, m), so the model is
/// deterministic per seed.
inline QuantileForest fit_qrf(const std::vector<std::vector<double>>& X,
                              const std::vector<double>& y,
                              const QrfParams& params,
                              std::uint64_t seed) {
    if (X.size() < 2 || X.size() != y.size()) {
        throw std::invalid_argument("fit_qrf: need at least two records");
    }
    if (params.n_trees < 1) {
        throw std::invalid_argument("fit_qrf: n_trees must be >= 1");
    }
    TreeParams tree_params = params.tree;
    tree_params.keep_leaf_samples = true;

    const std::size_t n = X.size();
    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_trees));
    std::vector<std::vector<double>> Xb(n);
    std::vector<double> yb(n);
    for (int m = 0; m < params.n_trees; ++m) {
        Rng rng(derive_seed({seed, 0xF0ULL, static_cast<std::uint64_t>(m)}));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pick = rng.below(n);
            Xb[i] = X[pick];
            yb[i] = y[pick];
        }
        trees.push_back(fit_tree(Xb, yb, tree_params));
    }
    return QuantileForest(X.front().size(), std::move(trees));
}

inline QuantileForest fit_qrf(const EvaluationDataset& data, const QrfParams& params,
                              std::uint64_t seed) {
    return fit_qrf(data.features(), data.responses(), params, seed);
}

}  // namespace treeprep
