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
#include <numeric>
#include <stdexcept>
#include <vector>

#include "treeprep/rng.hpp"

namespace treeprep {

/// A probability vector over measurement outcomes, either exact (from a
/// statevector) or empirical (from a finite number of shots). Empirical
/// distributions keep the raw counts so that "sums to one" is an exact
/// integer identity rather than a floating-point approximation.
class ProbabilityDistribution {
  public:
    enum class Kind { exact, empirical };

    static ProbabilityDistribution exact(std::vector<double> probs) {
        validate_exact(probs);
        ProbabilityDistribution d;
        d.probs_ = std::move(probs);
        d.kind_ = Kind::exact;
        return d;
    }

    static ProbabilityDistribution empirical(std::vector<std::int64_t> counts,
                                             std::int64_t shots) {
        if (shots < 1) {
            throw std::invalid_argument("empirical distribution needs shots >= 1");
        }
        std::int64_t total = 0;
        for (std::int64_t c : counts) {
            if (c < 0) {
                throw std::invalid_argument("negative outcome count");
            }
            total += c;
        }
        if (total != shots) {
            throw std::invalid_argument("counts do not sum to the shot total");
        }
        ProbabilityDistribution d;
        d.probs_.resize(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            d.probs_[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
        }
        d.counts_ = std::move(counts);
        d.kind_ = Kind::empirical;
        d.shots_ = shots;
        return d;
    }

    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    Kind kind() const { return kind_; }
    bool is_exact() const { return kind_ == Kind::exact; }
    std::int64_t shots() const { return shots_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

  private:
    ProbabilityDistribution() = default;

    static void validate_exact(const std::vector<double>& probs) {
        if (probs.empty()) {
            throw std::invalid_argument("empty probability vector");
        }
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) {
                throw std::invalid_argument("negative probability entry");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("probabilities sum to " + std::to_string(sum) +
                                        ", expected 1 within 1e-12");
        }
    }

    std::vector<double> probs_;
    std::vector<std::int64_t> counts_;  // empirical only
    Kind kind_ = Kind::exact;
    std::int64_t shots_ = 0;
};

/// Total variation distance: half the l1 distance between two probability
/// vectors. Symmetric, zero iff equal, at most one.
inline double tvd(const ProbabilityDistribution& p, const ProbabilityDistribution& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("tvd: distribution lengths differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += std::abs(p[i] - q[i]);
    }
    return 0.5 * acc;
}

inline double tvd(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("tvd: vector lengths differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += std::abs(p[i] - q[i]);
    }
    return 0.5 * acc;
}

/// Draws `shots` multinomial samples from an exact distribution and returns
/// the empirical distribution of outcome frequencies. Identical seeds give
/// bit-identical results.
inline ProbabilityDistribution sample_shots(const ProbabilityDistribution& p,
                                            std::int64_t shots,
                                            std::uint64_t seed) {
    if (!p.is_exact()) {
        throw std::invalid_argument("sample_shots expects an exact distribution");
    }
    if (shots < 1) {
        throw std::invalid_argument("sample_shots needs shots >= 1");
    }
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;  // guard against rounding in the final bin

    Rng rng(seed);
    std::vector<std::int64_t> counts(p.size(), 0);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), p.size() - 1);
        ++counts[idx];
    }
    return ProbabilityDistribution::empirical(std::move(counts), shots);
}

}  // namespace treeprep
