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
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "treeprep/ansatz.hpp"
#include "treeprep/common.hpp"
#include "treeprep/dataset.hpp"
#include "treeprep/gbrt.hpp"

namespace treeprep {

/// Axis-aligned box domain.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dimension() const { return lo.size(); }
    double diameter() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < lo.size(); ++i) {
            acc += (hi[i] - lo[i]) * (hi[i] - lo[i]);
        }
        return std::sqrt(acc);
    }

    static Box angles(std::size_t d) {
        return Box{std::vector<double>(d, 0.0), std::vector<double>(d, kTwoPi)};
    }
};

namespace detail {

inline constexpr int kHaltonPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                        37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                                        83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

inline double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double digit_weight = 1.0 / static_cast<double>(base);
    while (index > 0) {
        result += static_cast<double>(index % static_cast<std::uint64_t>(base)) * digit_weight;
        index /= static_cast<std::uint64_t>(base);
        digit_weight /= static_cast<double>(base);
    }
    return result;
}

/// Deterministic low-discrepancy probe set over the box: a Halton sequence
/// (offset by the seed so distinct seeds give distinct but reproducible
/// sets), augmented with the box corners in low dimension so the extreme
/// points of the domain are always probed.
inline std::vector<std::vector<double>> probe_set(const Box& box, int n_probes,
                                                  std::uint64_t seed) {
    const std::size_t d = box.dimension();
    if (d > std::size(kHaltonPrimes)) {
        throw std::invalid_argument("probe_set: dimension exceeds the Halton base table");
    }
    std::vector<std::vector<double>> probes;
    probes.reserve(static_cast<std::size_t>(n_probes));
    const std::uint64_t offset = seed == 0 ? 0 : derive_seed({seed}) % 100000;
    for (int i = 0; i < n_probes; ++i) {
        std::vector<double> p(d);
        for (std::size_t j = 0; j < d; ++j) {
            const double u = radical_inverse(static_cast<std::uint64_t>(i) + 1 + offset,
                                             kHaltonPrimes[j]);
            p[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * u;
        }
        probes.push_back(std::move(p));
    }
    if (d <= 12 && (std::size_t{1} << d) <= static_cast<std::size_t>(n_probes)) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
            std::vector<double> corner(d);
            for (std::size_t j = 0; j < d; ++j) {
                corner[j] = (mask >> j) & 1 ? box.hi[j] : box.lo[j];
            }
            probes.push_back(std::move(corner));
        }
    }
    return probes;
}

inline double min_distance_sq(const std::vector<double>& probe,
                              const std::vector<ParameterVector>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (const ParameterVector& pt : points) {
        double acc = 0.0;
        for (std::size_t j = 0; j < probe.size(); ++j) {
            const double diff = probe[j] - pt[j];
            acc += diff * diff;
        }
        best = std::min(best, acc);
    }
    return best;
}

}  // namespace detail

/// Estimates the covering radius sup_theta min_i ||theta - theta_i|| by
/// maximizing over a deterministic probe set. The estimate is a lower
/// bound on the true supremum (the probe set is finite); it improves with
/// the probe count and is exact at the box corners in low dimension.
inline double covering_radius(const std::vector<ParameterVector>& points, const Box& box,
                              int n_probes, std::uint64_t seed = 0) {
    if (points.empty()) {
        throw std::invalid_argument("covering_radius: need at least one point");
    }
    if (n_probes < 1) {
        throw std::invalid_argument("covering_radius: need at least one probe");
    }
    const auto probes = detail::probe_set(box, n_probes, seed);
    double worst = 0.0;
    for (const auto& probe : probes) {
        worst = std::max(worst, detail::min_distance_sq(probe, points));
    }
    return std::sqrt(worst);
}

/// Covering radius of every prefix of the query sequence, over one shared
/// probe set (so the curve is non-increasing by construction).
inline std::vector<double> covering_radius_curve(const std::vector<ParameterVector>& points,
                                                 const Box& box, int n_probes,
                                                 std::uint64_t seed = 0) {
    if (points.empty()) {
        return {};
    }
    const auto probes = detail::probe_set(box, n_probes, seed);
    std::vector<double> nearest_sq(probes.size(), std::numeric_limits<double>::infinity());
    std::vector<double> curve(points.size());
    for (std::size_t t = 0; t < points.size(); ++t) {
        double worst = 0.0;
        for (std::size_t k = 0; k < probes.size(); ++k) {
            double acc = 0.0;
            const auto& probe = probes[k];
            for (std::size_t j = 0; j < probe.size(); ++j) {
                const double diff = probe[j] - points[t][j];
                acc += diff * diff;
            }
            nearest_sq[k] = std::min(nearest_sq[k], acc);
            worst = std::max(worst, nearest_sq[k]);
        }
        curve[t] = std::sqrt(worst);
    }
    return curve;
}

/// Sphere-packing upper bound on the covering radius after t queries:
///
///     rho_t <= (C_d D^d / t)^(1/d),   C_d = pi^(d/2) / Gamma(1 + d/2)
///
/// evaluated through lgamma for numerical stability.
inline double packing_bound(std::int64_t t, int d, double diameter) {
    if (t < 1 || d < 1 || !(diameter > 0.0)) {
        throw std::invalid_argument("packing_bound: need t >= 1, d >= 1, D > 0");
    }
    const double dd = static_cast<double>(d);
    const double log_cd = 0.5 * dd * std::log(kTwoPi / 2.0) - std::lgamma(1.0 + dd / 2.0);
    return std::exp((log_cd + dd * std::log(diameter) - std::log(static_cast<double>(t))) / dd);
}

/// Unit-ball volume C_d (exposed for the arithmetic checks).
inline double unit_ball_volume(int d) {
    const double dd = static_cast<double>(d);
    return std::exp(0.5 * dd * std::log(kTwoPi / 2.0) - std::lgamma(1.0 + dd / 2.0));
}

struct RegretCurve {
    std::vector<double> instantaneous;  // f(theta_t) - f_star per query
    std::vector<double> best_so_far;    // running minimum of the above
    double fitted_exponent = 0.0;       // log-log slope over the second half
};

/// Simple-regret curves of a query sequence with known optimum. The rate
/// exponent comes from a least-squares fit of log(best-so-far regret)
/// against log t over the second half of the run; best-so-far is used
/// because instantaneous regret is non-monotone under exploration.
/// Regrets are clamped at 1e-12 before taking logs.
inline RegretCurve regret_curve(const std::vector<double>& f_values, double f_star) {
    if (f_values.size() < 4) {
        throw std::invalid_argument("regret_curve: need at least four iterations");
    }
    RegretCurve out;
    out.instantaneous.resize(f_values.size());
    out.best_so_far.resize(f_values.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < f_values.size(); ++t) {
        out.instantaneous[t] = f_values[t] - f_star;
        best = std::min(best, out.instantaneous[t]);
        out.best_so_far[t] = best;
    }

    const std::size_t n = f_values.size();
    const std::size_t start = n / 2;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double count = static_cast<double>(n - start);
    for (std::size_t t = start; t < n; ++t) {
        const double x = std::log(static_cast<double>(t + 1));
        const double y = std::log(std::max(out.best_so_far[t], 1e-12));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = count * sxx - sx * sx;
    out.fitted_exponent = denom != 0.0 ? (count * sxy - sx * sy) / denom : 0.0;
    return out;
}

/// Empirical lower bound on the Lipschitz constant of the objective:
/// max |y_i - y_j| / ||theta_i - theta_j|| over all record pairs.
inline double lipschitz_lower_bound(const EvaluationDataset& data) {
    double best = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = i + 1; j < data.size(); ++j) {
            const double dist = l2_distance(data[i].theta, data[j].theta);
            if (dist > 0.0) {
                best = std::max(best, std::abs(data[i].y - data[j].y) / dist);
            }
        }
    }
    return best;
}

struct NoiseGapRow {
    double sigma = 0.0;
    double tail_mean_f = 0.0;
    double bound = 0.0;  // f_star + sigma + slack
    bool within = false;
};

/// Checks the noisy-convergence gap: for each noise level, the tail mean
/// of the exact loss at queried points should not exceed
/// f_star + sigma + slack. The tail is the final tail_fraction of the
/// query sequence (skipping warm-up transients).
inline std::vector<NoiseGapRow> noise_gap_check(
    const std::vector<std::pair<double, std::vector<double>>>& f_exact_by_sigma,
    double f_star, double slack = 0.05, double tail_fraction = 0.25) {
    std::vector<NoiseGapRow> rows;
    rows.reserve(f_exact_by_sigma.size());
    for (const auto& [sigma, f_values] : f_exact_by_sigma) {
        if (f_values.empty()) {
            throw std::invalid_argument("noise_gap_check: empty query sequence");
        }
        const std::size_t tail =
            std::max<std::size_t>(1, static_cast<std::size_t>(
                                         tail_fraction * static_cast<double>(f_values.size())));
        double acc = 0.0;
        for (std::size_t t = f_values.size() - tail; t < f_values.size(); ++t) {
            acc += f_values[t];
        }
        NoiseGapRow row;
        row.sigma = sigma;
        row.tail_mean_f = acc / static_cast<double>(tail);
        row.bound = f_star + sigma + slack;
        row.within = row.tail_mean_f <= row.bound;
        rows.push_back(row);
    }
    return rows;
}

struct DiagnosticsOptions {
    int probe_count = 20000;
    std::uint64_t probe_seed = 0;
    std::optional<double> f_star;
};

struct DiagnosticsReport {
    std::vector<double> covering_radius;  // per iteration
    std::vector<double> packing_bound;    // per iteration
    std::vector<double> eta;              // variance floor per iteration
    std::vector<double> regret_instantaneous;
    std::vector<double> regret_best_so_far;
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    double lipschitz_lower = 0.0;
    double sigma_hat = std::numeric_limits<double>::quiet_NaN();
};

/// Assembles the full report from a run's dataset. exact_loss, when
/// provided, re-evaluates the noiseless objective at each query; regret
/// and the noise estimate sigma_hat are only available with it (or, for
/// regret, when the observations themselves are exact).
inline DiagnosticsReport build_report(
    const EvaluationDataset& data, double shrinkage, int m_max,
    const DiagnosticsOptions& options,
    const std::function<double(const ParameterVector&)>& exact_loss = nullptr) {
    if (data.empty()) {
        throw std::invalid_argument("build_report: empty dataset");
    }
    DiagnosticsReport report;

    std::vector<ParameterVector> points;
    points.reserve(data.size());
    for (const Observation& record : data.records()) {
        points.push_back(record.theta);
    }
    const Box box = Box::angles(data.dimension());
    report.covering_radius =
        covering_radius_curve(points, box, options.probe_count, options.probe_seed);
    report.packing_bound.resize(data.size());
    for (std::size_t t = 0; t < data.size(); ++t) {
        report.packing_bound[t] = packing_bound(static_cast<std::int64_t>(t) + 1,
                                                static_cast<int>(data.dimension()),
                                                box.diameter());
    }

    report.eta.resize(data.size());
    std::vector<double> prefix;
    prefix.reserve(data.size());
    for (std::size_t t = 0; t < data.size(); ++t) {
        prefix.push_back(data[t].y);
        report.eta[t] = variance_floor_eta(prefix, shrinkage, m_max);
    }

    report.lipschitz_lower = lipschitz_lower_bound(data);

    std::vector<double> f_exact;
    if (exact_loss) {
        f_exact.reserve(data.size());
        double worst_gap = 0.0;
        for (const Observation& record : data.records()) {
            const double f = exact_loss(record.theta);
            f_exact.push_back(f);
            worst_gap = std::max(worst_gap, std::abs(record.y - f));
        }
        report.sigma_hat = worst_gap;
    }
    if (options.f_star.has_value() && data.size() >= 4) {
        const std::vector<double>& f_values = exact_loss ? f_exact : data.responses();
        const RegretCurve rc = regret_curve(f_values, *options.f_star);
        report.regret_instantaneous = rc.instantaneous;
        report.regret_best_so_far = rc.best_so_far;
        report.fitted_exponent = rc.fitted_exponent;
    }
    return report;
}

}  // namespace treeprep
