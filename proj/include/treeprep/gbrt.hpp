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

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "treeprep/common.hpp"
#include "treeprep/dataset.hpp"
#include "treeprep/tree.hpp"

namespace treeprep {

struct GbrtParams {
    int n_trees = 100;
    double shrinkage = 0.1;
    TreeParams tree{3, 1, false};
};

/// Gradient-boosted regression trees under squared loss. The model is the
/// stagewise sum
///
///     prediction(x) = base + shrinkage * sum_m h_m(x)
///
/// where base is the response mean and stage m fits h_m to the residuals
/// of the partial sum before it (the negative gradient of the squared
/// loss). Boosting is deterministic: no subsampling, and the tree fits
/// break ties by fixed rules, so identical data and hyperparameters give
/// bit-identical models.
class BoostedEnsemble {
  public:
    BoostedEnsemble() = default;
    BoostedEnsemble(double base, double shrinkage, std::size_t dimension,
                    std::vector<RegressionTree> trees)
        : base_(base), shrinkage_(shrinkage), dimension_(dimension), trees_(std::move(trees)) {
        if (trees_.empty()) {
            throw std::invalid_argument("BoostedEnsemble needs at least one tree");
        }
        if (shrinkage_ <= 0.0 || shrinkage_ > 1.0) {
            throw std::invalid_argument("shrinkage must lie in (0, 1]");
        }
    }

    double base() const { return base_; }
    double shrinkage() const { return shrinkage_; }
    std::size_t dimension() const { return dimension_; }
    std::size_t n_trees() const { return trees_.size(); }
    const std::vector<RegressionTree>& trees() const { return trees_; }

    double predict(std::span<const double> x) const {
        check_dim(x);
        double acc = base_;
        for (const RegressionTree& t : trees_) {
            acc += shrinkage_ * t.predict(x);
        }
        return acc;
    }

    /// Raw per-tree outputs h_m(x), before shrinkage.
    std::vector<double> per_tree_values(std::span<const double> x) const {
        check_dim(x);
        std::vector<double> h(trees_.size());
        for (std::size_t m = 0; m < trees_.size(); ++m) {
            h[m] = trees_[m].predict(x);
        }
        return h;
    }

    /// The plain tree average (1/M) sum_m h_m(x). Exposed alongside
    /// predict() because the consumers differ: point estimates use the
    /// boosted sum, the uncertainty machinery uses tree dispersion.
    double tree_mean(std::span<const double> x) const {
        const std::vector<double> h = per_tree_values(x);
        double acc = 0.0;
        for (double v : h) {
            acc += v;
        }
        return acc / static_cast<double>(h.size());
    }

  private:
    void check_dim(std::span<const double> x) const {
        if (x.size() != dimension_) {
            throw std::invalid_argument("BoostedEnsemble: input dimension mismatch");
        }
    }

    double base_ = 0.0;
    double shrinkage_ = 0.1;
    std::size_t dimension_ = 0;
    std::vector<RegressionTree> trees_;
};

inline BoostedEnsemble fit_gbrt(const std::vector<std::vector<double>>& X,
                                const std::vector<double>& y,
                                const GbrtParams& params = {}) {
    if (X.empty() || X.size() != y.size()) {
        throw std::invalid_argument("fit_gbrt: need at least one record");
    }
    if (params.n_trees < 1) {
        throw std::invalid_argument("fit_gbrt: n_trees must be >= 1");
    }
    if (params.shrinkage <= 0.0 || params.shrinkage > 1.0) {
        throw std::invalid_argument("fit_gbrt: shrinkage must lie in (0, 1]");
    }

    double base = 0.0;
    for (double v : y) {
        base += v;
    }
    base /= static_cast<double>(y.size());

    std::vector<double> residuals(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        residuals[i] = y[i] - base;
    }

    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int m = 0; m < params.n_trees; ++m) {
        RegressionTree tree = fit_tree(X, residuals, params.tree);
        for (std::size_t i = 0; i < residuals.size(); ++i) {
            residuals[i] -= params.shrinkage * tree.predict(X[i]);
        }
        trees.push_back(std::move(tree));
    }
    return BoostedEnsemble(base, params.shrinkage, X.front().size(), std::move(trees));
}

inline BoostedEnsemble fit_gbrt(const EvaluationDataset& data, const GbrtParams& params = {}) {
    return fit_gbrt(data.features(), data.responses(), params);
}

/// Guaranteed minimum ensemble variance at unexplored points:
///
///     eta = shrinkage^2 / M_max * (1/t) * sum_i (y_i - mean(y))^2
///
/// Zero only for constant responses.
inline double variance_floor_eta(const std::vector<double>& y, double shrinkage, int m_max) {
    if (y.empty()) {
        throw std::invalid_argument("variance_floor_eta: need at least one observation");
    }
    if (m_max < 1) {
        throw std::invalid_argument("variance_floor_eta: m_max must be >= 1");
    }
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(y.size());
    return shrinkage * shrinkage / static_cast<double>(m_max) * var;
}

inline double variance_floor_eta(const EvaluationDataset& data, double shrinkage, int m_max) {
    return variance_floor_eta(data.responses(), shrinkage, m_max);
}

/// Default trigger distance for the variance floor: 1% of the domain
/// diameter 2*pi*sqrt(d). Exact membership would never fire on continuous
/// parameters, so "unexplored" means farther than this from every record.
inline double default_floor_distance(std::size_t dimension) {
    return 0.01 * kTwoPi * std::sqrt(static_cast<double>(dimension));
}

struct UncertainPrediction {
    double mean = 0.0;
    double std = 0.0;
    bool floor_applied = false;
};

/// Point prediction plus ensemble spread. The spread is the standard
/// deviation of the per-tree outputs h_m(x); whenever x is farther than
/// floor_distance from every training point, the variance is clamped from
/// below by the floor eta so unexplored regions stay attractive to the
/// acquisition rules.
inline UncertainPrediction predict_uncertain(const BoostedEnsemble& ensemble,
                                             std::span<const double> x,
                                             const std::vector<std::vector<double>>& X_train,
                                             const std::vector<double>& y_train,
                                             double floor_distance = -1.0) {
    if (X_train.empty()) {
        throw std::invalid_argument("predict_uncertain: empty training set");
    }
    if (floor_distance < 0.0) {
        floor_distance = default_floor_distance(ensemble.dimension());
    }

    UncertainPrediction out;
    out.mean = ensemble.predict(x);

    const std::vector<double> h = ensemble.per_tree_values(x);
    double mu = 0.0;
    for (double v : h) {
        mu += v;
    }
    mu /= static_cast<double>(h.size());
    double raw_var = 0.0;
    for (double v : h) {
        raw_var += (v - mu) * (v - mu);
    }
    raw_var /= static_cast<double>(h.size());

    double nearest_sq = std::numeric_limits<double>::infinity();
    for (const auto& row : X_train) {
        double dist_sq = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double diff = row[j] - x[j];
            dist_sq += diff * diff;
        }
        nearest_sq = std::min(nearest_sq, dist_sq);
    }

    double var = raw_var;
    if (nearest_sq > floor_distance * floor_distance) {
        const double eta = variance_floor_eta(
            y_train, ensemble.shrinkage(), static_cast<int>(ensemble.n_trees()));
        var = std::max(raw_var, eta);
        out.floor_applied = true;
    }
    out.std = std::sqrt(var);
    return out;
}

inline UncertainPrediction predict_uncertain(const BoostedEnsemble& ensemble,
                                             const ParameterVector& theta,
                                             const EvaluationDataset& data,
                                             double floor_distance = -1.0) {
    if (data.empty()) {
        throw std::invalid_argument("predict_uncertain: empty dataset");
    }
    return predict_uncertain(ensemble, theta.values(), data.features(), data.responses(),
                             floor_distance);
}

}  // namespace treeprep
