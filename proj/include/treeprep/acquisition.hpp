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
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "treeprep/ansatz.hpp"
#include "treeprep/gbrt.hpp"
#include "treeprep/qrf.hpp"
#include "treeprep/rng.hpp"

namespace treeprep {

inline double normal_pdf(double z) {
    static const double kInvSqrtTwoPi = 0.398942280401432677939946;
    return kInvSqrtTwoPi * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

enum class AcquisitionKind { ei, ucb };

/// Scoring configuration. kappa <= 0 selects the sqrt(2 ln t) schedule;
/// a positive value is used as a fixed exploration multiplier.
struct AcquisitionConfig {
    AcquisitionKind kind = AcquisitionKind::ei;
    double kappa = 0.0;  // <= 0: schedule sqrt(2 ln t)
    int n_candidates = 512;
    double sigma_prop = 0.25;  // radians; incumbent-perturbation scale

    void validate() const {
        if (n_candidates < 1) {
            throw config_error("acquisition: n_candidates must be >= 1");
        }
        if (!(sigma_prop > 0.0)) {
            throw config_error("acquisition: sigma_prop must be > 0");
        }
    }
};

/// Closed-form expected improvement under a Gaussian N(mean, std^2)
/// pseudo-posterior, for minimization:
///
///     EI = (f_best - mu) Phi(z) + std * phi(z),  z = (f_best - mu) / std
///
/// collapsing to max(f_best - mu, 0) when std = 0.
inline double expected_improvement(const UncertainPrediction& pred, double f_best) {
    if (pred.std < 0.0) {
        throw std::invalid_argument("expected_improvement: negative std");
    }
    const double gap = f_best - pred.mean;
    if (pred.std == 0.0) {
        return gap > 0.0 ? gap : 0.0;
    }
    const double z = gap / pred.std;
    return gap * normal_cdf(z) + pred.std * normal_pdf(z);
}

/// Empirical expected improvement over a sample set (used with the
/// quantile forest, whose pooled leaf samples stand in for a posterior).
inline double expected_improvement(std::span<const double> samples, double f_best) {
    if (samples.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (double v : samples) {
        acc += std::max(f_best - v, 0.0);
    }
    return acc / static_cast<double>(samples.size());
}

/// Lower-confidence score mu - kappa * std; the acquisition minimizes it.
inline double ucb_score(const UncertainPrediction& pred, double kappa) {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("ucb_score: kappa must be > 0");
    }
    return pred.mean - kappa * pred.std;
}

/// Exploration multiplier schedule sqrt(2 ln t), held at its t = 2 value
/// below t = 2.
inline double kappa_schedule(std::int64_t t) {
    const double tt = t < 2 ? 2.0 : static_cast<double>(t);
    return std::sqrt(2.0 * std::log(tt));
}

inline double effective_kappa(const AcquisitionConfig& cfg, std::int64_t t) {
    return cfg.kappa > 0.0 ? cfg.kappa : kappa_schedule(t);
}

/// The active search region for one proposal: every coordinate equals
/// base's except the free indices, which range over [0, 2*pi).
struct SubBox {
    ParameterVector base;
    std::vector<std::size_t> free_indices;

    static SubBox full(const ParameterVector& base) {
        std::vector<std::size_t> all(base.size());
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = i;
        }
        return SubBox{base, std::move(all)};
    }
};

namespace detail {

/// Canonical "bigger is better" acquisition value of a projected candidate.
template <class Model>
double acquisition_value(const Model& model, std::span<const double> x_proj,
                         const std::vector<std::vector<double>>& X_train,
                         const std::vector<double>& y_train,
                         const AcquisitionConfig& cfg, double f_best, std::int64_t t) {
    if constexpr (requires { model.pooled_samples(x_proj); }) {
        if (cfg.kind == AcquisitionKind::ei) {
            const std::vector<double> pool = model.pooled_samples(x_proj);
            return expected_improvement(std::span<const double>(pool), f_best);
        }
        return -ucb_score(model.predict_uncertain_raw(x_proj), effective_kappa(cfg, t));
    } else {
        const UncertainPrediction pred = predict_uncertain(model, x_proj, X_train, y_train);
        if (cfg.kind == AcquisitionKind::ei) {
            return expected_improvement(pred, f_best);
        }
        return -ucb_score(pred, effective_kappa(cfg, t));
    }
}

}  // namespace detail

/// Proposes the next query by deterministic candidate-set maximization:
/// the first ceil(N/2) candidates are uniform draws over the sub-box, the
/// rest are Gaussian perturbations (scale sigma_prop, wrapped mod 2*pi) of
/// the incumbent's free coordinates. Returns the best scorer; ties keep
/// the lowest candidate index. X_train / y_train are in the projected
/// (free-coordinate) space the model was fit on.
template <class Model>
ParameterVector propose_next(const Model& model,
                             const std::vector<std::vector<double>>& X_train,
                             const std::vector<double>& y_train,
                             const SubBox& domain,
                             const AcquisitionConfig& cfg,
                             double f_best,
                             std::int64_t t,
                             Rng& rng) {
    if (domain.free_indices.empty()) {
        throw std::invalid_argument("propose_next: empty sub-box");
    }
    cfg.validate();

    const std::size_t n_free = domain.free_indices.size();
    const int n_uniform = (cfg.n_candidates + 1) / 2;

    std::vector<double> x_proj(n_free);
    std::vector<double> best_proj;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cfg.n_candidates; ++c) {
        if (c < n_uniform) {
            for (std::size_t k = 0; k < n_free; ++k) {
                x_proj[k] = rng.uniform(0.0, kTwoPi);
            }
        } else {
            for (std::size_t k = 0; k < n_free; ++k) {
                const double center = domain.base[domain.free_indices[k]];
                x_proj[k] = wrap_angle(center + cfg.sigma_prop * rng.normal());
            }
        }
        const double score =
            detail::acquisition_value(model, x_proj, X_train, y_train, cfg, f_best, t);
        if (score > best_score) {
            best_score = score;
            best_proj = x_proj;
        }
    }

    ParameterVector result = domain.base;
    for (std::size_t k = 0; k < n_free; ++k) {
        result.set(domain.free_indices[k], best_proj[k]);
    }
    return result;
}

}  // namespace treeprep
