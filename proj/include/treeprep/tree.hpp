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
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace treeprep {

struct TreeParams {
    int max_depth = 3;
    int min_samples_leaf = 1;
    /// When set, leaves additionally retain the response values routed to
    /// them (needed by the quantile forest).
    bool keep_leaf_samples = false;
};

/// Axis-aligned binary regression tree stored as a flat node arena.
/// Internal nodes route x[feature] <= threshold to the left child. Leaves
/// predict the arithmetic mean of their assigned residuals; a leaf with
/// count == 0 predicts 0.
class RegressionTree {
  public:
    struct Node {
        int feature = -1;          // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;        // leaf prediction
        int count = 0;             // training samples assigned to the leaf
        std::vector<double> samples;  // leaf responses, when retained
    };

    RegressionTree() = default;
    explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
        for (const Node& n : nodes_) {
            if (n.feature < 0 && n.count == 0 && n.value != 0.0) {
                throw std::invalid_argument("empty leaves must predict 0");
            }
        }
    }

    bool empty() const { return nodes_.empty(); }
    const std::vector<Node>& nodes() const { return nodes_; }

    double predict(std::span<const double> x) const { return leaf(x).value; }

    const Node& leaf(std::span<const double> x) const {
        int idx = 0;
        for (;;) {
            const Node& n = nodes_[static_cast<std::size_t>(idx)];
            if (n.feature < 0) {
                return n;
            }
            idx = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
    }

    int n_leaves() const {
        int count = 0;
        for (const Node& n : nodes_) {
            count += n.feature < 0 ? 1 : 0;
        }
        return count;
    }

  private:
    friend RegressionTree fit_tree(const std::vector<std::vector<double>>&,
                                   const std::vector<double>&, const TreeParams&);
    std::vector<Node> nodes_;
};

namespace detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    std::size_t left_count = 0;
    double sse = std::numeric_limits<double>::infinity();
};

inline double subset_mean(const std::vector<double>& y, const std::vector<std::size_t>& idx) {
    double acc = 0.0;
    for (std::size_t i : idx) {
        acc += y[i];
    }
    return acc / static_cast<double>(idx.size());
}

/// Sum of squared deviations from the subset mean (two-pass, never negative).
inline double subset_sse(const std::vector<double>& y, const std::vector<std::size_t>& idx,
                         double mean) {
    double acc = 0.0;
    for (std::size_t i : idx) {
        const double diff = y[i] - mean;
        acc += diff * diff;
    }
    return acc;
}

/// Greedy exhaustive split search over all (feature, midpoint threshold)
/// candidates, minimizing the summed child SSE. Ties keep the first
/// candidate encountered, i.e. lowest feature index, then lowest threshold.
inline SplitChoice best_split(const std::vector<std::vector<double>>& X,
                              const std::vector<double>& y,
                              std::vector<std::size_t>& idx,
                              int min_samples_leaf) {
    const std::size_t n = idx.size();
    SplitChoice best;
    std::vector<std::size_t> order(idx);
    std::vector<double> prefix_y(n + 1), prefix_y2(n + 1);

    const std::size_t n_features = X.front().size();
    for (std::size_t f = 0; f < n_features; ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = X[a][f];
            const double vb = X[b][f];
            return va != vb ? va < vb : a < b;
        });
        prefix_y[0] = 0.0;
        prefix_y2[0] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = y[order[k]];
            prefix_y[k + 1] = prefix_y[k] + v;
            prefix_y2[k + 1] = prefix_y2[k] + v * v;
        }
        for (std::size_t k = 1; k < n; ++k) {
            const double lo = X[order[k - 1]][f];
            const double hi = X[order[k]][f];
            if (lo == hi) {
                continue;  // no threshold separates equal values
            }
            if (k < static_cast<std::size_t>(min_samples_leaf) ||
                n - k < static_cast<std::size_t>(min_samples_leaf)) {
                continue;
            }
            const double nl = static_cast<double>(k);
            const double nr = static_cast<double>(n - k);
            const double sse_l = std::max(0.0, prefix_y2[k] - prefix_y[k] * prefix_y[k] / nl);
            const double sum_r = prefix_y[n] - prefix_y[k];
            const double sq_r = prefix_y2[n] - prefix_y2[k];
            const double sse_r = std::max(0.0, sq_r - sum_r * sum_r / nr);
            const double total = sse_l + sse_r;
            if (total < best.sse) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = lo + (hi - lo) / 2.0;
                best.left_count = k;
                best.sse = total;
            }
        }
    }
    return best;
}

}  // namespace detail

/// Fits a regression tree to (X, y) by greedy least-squares splitting.
/// Growth stops at max_depth, when a child would fall below
/// min_samples_leaf, or when the node's residuals are all identical.
/// Fully deterministic for a given input order.
inline RegressionTree fit_tree(const std::vector<std::vector<double>>& X,
                               const std::vector<double>& y,
                               const TreeParams& params = {}) {
    if (X.empty() || X.size() != y.size()) {
        throw std::invalid_argument("fit_tree: need at least one (x, residual) point");
    }
    if (params.max_depth < 0 || params.min_samples_leaf < 1) {
        throw std::invalid_argument("fit_tree: invalid tree parameters");
    }

    std::vector<RegressionTree::Node> nodes;
    // (node index, assigned sample indices, depth) work stack.
    struct WorkItem {
        std::size_t node;
        std::vector<std::size_t> idx;
        int depth;
    };
    std::vector<WorkItem> stack;
    std::vector<std::size_t> all(X.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    nodes.emplace_back();
    stack.push_back(WorkItem{0, std::move(all), 0});

    while (!stack.empty()) {
        WorkItem item = std::move(stack.back());
        stack.pop_back();

        auto make_leaf = [&](const std::vector<std::size_t>& idx) {
            RegressionTree::Node& leaf = nodes[item.node];
            leaf.feature = -1;
            leaf.count = static_cast<int>(idx.size());
            leaf.value = detail::subset_mean(y, idx);
            if (params.keep_leaf_samples) {
                leaf.samples.reserve(idx.size());
                for (std::size_t i : idx) {
                    leaf.samples.push_back(y[i]);
                }
            }
        };

        const auto [lo_it, hi_it] = std::minmax_element(
            item.idx.begin(), item.idx.end(),
            [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
        const bool pure = y[*lo_it] == y[*hi_it];
        if (item.depth >= params.max_depth || pure ||
            item.idx.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
            make_leaf(item.idx);
            continue;
        }

        const detail::SplitChoice split =
            detail::best_split(X, y, item.idx, params.min_samples_leaf);
        if (!split.found) {
            make_leaf(item.idx);
            continue;
        }

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(split.left_count);
        right_idx.reserve(item.idx.size() - split.left_count);
        for (std::size_t i : item.idx) {
            (X[i][static_cast<std::size_t>(split.feature)] <= split.threshold ? left_idx
                                                                              : right_idx)
                .push_back(i);
        }

        RegressionTree::Node& node = nodes[item.node];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = static_cast<int>(nodes.size());
        node.right = static_cast<int>(nodes.size() + 1);
        nodes.emplace_back();
        nodes.emplace_back();
        const std::size_t left_node = static_cast<std::size_t>(node.left);
        const std::size_t right_node = static_cast<std::size_t>(node.right);
        stack.push_back(WorkItem{right_node, std::move(right_idx), item.depth + 1});
        stack.push_back(WorkItem{left_node, std::move(left_idx), item.depth + 1});
    }

    RegressionTree tree;
    tree.nodes_ = std::move(nodes);
    return tree;
}

}  // namespace treeprep
