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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeprep/ansatz.hpp"

namespace treeprep {

/// One recorded loss evaluation. The tag carries provenance ("warmup",
/// "block:2", "sync", ...) for post-hoc analysis.
struct Observation {
    ParameterVector theta;
    double y = 0.0;
    std::string tag;
};

/// Append-only log of (theta, y) pairs; insertion order defines the
/// iteration index t. All points share one dimensionality.
class EvaluationDataset {
  public:
    EvaluationDataset() = default;
    explicit EvaluationDataset(std::size_t dimension) : dimension_(dimension) {}

    void append(ParameterVector theta, double y, std::string tag = {}) {
        if (dimension_ == 0) {
            dimension_ = theta.size();
        }
        if (theta.size() != dimension_) {
            throw std::invalid_argument("dataset append: dimension mismatch");
        }
        records_.push_back(Observation{std::move(theta), y, std::move(tag)});
    }

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    std::size_t dimension() const { return dimension_; }
    const Observation& operator[](std::size_t i) const { return records_[i]; }
    const std::vector<Observation>& records() const { return records_; }

    std::vector<double> responses() const {
        std::vector<double> y(records_.size());
        for (std::size_t i = 0; i < records_.size(); ++i) {
            y[i] = records_[i].y;
        }
        return y;
    }

    /// Feature matrix restricted to the given coordinate block (empty block
    /// = all coordinates), one row per record.
    std::vector<std::vector<double>> features(const std::vector<std::size_t>& block = {}) const {
        std::vector<std::vector<double>> rows(records_.size());
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& theta = records_[i].theta;
            if (block.empty()) {
                rows[i] = theta.values();
            } else {
                rows[i].reserve(block.size());
                for (std::size_t j : block) {
                    rows[i].push_back(theta[j]);
                }
            }
        }
        return rows;
    }

  private:
    std::vector<Observation> records_;
    std::size_t dimension_ = 0;
};

}  // namespace treeprep
