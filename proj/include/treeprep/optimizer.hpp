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
#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeprep/acquisition.hpp"
#include "treeprep/ansatz.hpp"
#include "treeprep/dataset.hpp"
#include "treeprep/gbrt.hpp"
#include "treeprep/qrf.hpp"
#include "treeprep/rng.hpp"
#include "treeprep/targets.hpp"

namespace treeprep {

enum class PartitionMode { full, random_subspace, layerwise };

inline std::string to_string(PartitionMode m) {
    switch (m) {
        case PartitionMode::full: return "full";
        case PartitionMode::random_subspace: return "random_subspace";
        case PartitionMode::layerwise: return "layerwise";
    }
    return "?";
}

struct SurrogateConfig {
    enum class Kind { gbrt, qrf };
    /// Whether per-block surrogates train on all records (projected to the
    /// block's coordinates) or only on records of the current
    /// synchronization epoch.
    enum class TrainScope { all_records, epoch_records };

    Kind kind = Kind::gbrt;
    int n_trees = 100;
    double shrinkage = 0.1;  // gbrt only
    int max_depth = 3;
    int min_samples_leaf = 1;
    TrainScope scope = TrainScope::all_records;

    static SurrogateConfig defaults(Kind kind) {
        SurrogateConfig cfg;
        cfg.kind = kind;
        if (kind == Kind::qrf) {
            cfg.n_trees = 50;
            cfg.max_depth = 8;
            cfg.min_samples_leaf = 2;
        }
        return cfg;
    }

    GbrtParams gbrt_params() const {
        return GbrtParams{n_trees, shrinkage, TreeParams{max_depth, min_samples_leaf, false}};
    }
    QrfParams qrf_params() const {
        return QrfParams{n_trees, TreeParams{max_depth, min_samples_leaf, true}};
    }

    void validate() const {
        if (n_trees < 1) {
            throw config_error("surrogate: n_trees must be >= 1");
        }
        if (kind == Kind::gbrt && (shrinkage <= 0.0 || shrinkage > 1.0)) {
            throw config_error("surrogate: shrinkage must lie in (0, 1]");
        }
        if (max_depth < 0 || min_samples_leaf < 1) {
            throw config_error("surrogate: invalid tree parameters");
        }
    }
};

struct RunConfig {
    PartitionMode mode = PartitionMode::layerwise;
    int block_size = 0;               // random_subspace only
    bool reshuffle_each_cycle = false;  // random_subspace only
    int budget_cycles = 50;           // outer iterations T
    int n_init = 0;                   // warm-up evaluations; 0 = max(10, 2d)
    std::int64_t shots = 0;           // per evaluation; 0 = exact
    int inner_iters = 3;              // proposals per block per cycle
    std::int64_t max_evals = 0;       // hard cap on evaluations; 0 = none
    double noise_sigma = 0.0;         // injected Uniform[-sigma, sigma] noise on y
    std::uint64_t seed = 0;
    bool parallel_workers = true;     // run blocks concurrently between barriers
    AcquisitionConfig acquisition;
    SurrogateConfig surrogate;

    int resolved_n_init(std::size_t dimension) const {
        return n_init > 0 ? n_init : std::max<int>(10, 2 * static_cast<int>(dimension));
    }

    void validate(std::size_t dimension) const {
        if (budget_cycles < 0) {
            throw config_error("run: budget_cycles must be >= 0");
        }
        if (n_init < 0 || resolved_n_init(dimension) < 1) {
            throw config_error("run: n_init must be >= 1");
        }
        if (shots < 0) {
            throw config_error("run: shots must be >= 1, or 0 for exact evaluation");
        }
        if (inner_iters < 1) {
            throw config_error("run: inner_iters must be >= 1");
        }
        if (max_evals < 0) {
            throw config_error("run: max_evals must be >= 0");
        }
        if (noise_sigma < 0.0) {
            throw config_error("run: noise_sigma must be >= 0");
        }
        if (mode == PartitionMode::random_subspace &&
            (block_size < 1 || block_size > static_cast<int>(dimension))) {
            throw config_error("run: block_size must lie in [1, d]");
        }
        acquisition.validate();
        surrogate.validate();
    }
};

/// Ordered disjoint index blocks covering {0 .. d-1}.
struct LayerPartition {
    std::vector<std::vector<std::size_t>> blocks;
};

/// Uniformly random partition into consecutive chunks of a shuffled index
/// permutation; the last block may be smaller. Deterministic per seed.
inline LayerPartition random_partition(std::size_t d, int block_size, std::uint64_t seed) {
    if (block_size < 1 || block_size > static_cast<int>(d)) {
        throw std::invalid_argument("random_partition: block_size out of range");
    }
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed({seed, 0x9A27ULL}));
    for (std::size_t i = d; i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(perm[i - 1], perm[j]);
    }
    LayerPartition part;
    for (std::size_t start = 0; start < d; start += static_cast<std::size_t>(block_size)) {
        const std::size_t stop = std::min(d, start + static_cast<std::size_t>(block_size));
        std::vector<std::size_t> block(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                       perm.begin() + static_cast<std::ptrdiff_t>(stop));
        std::sort(block.begin(), block.end());
        part.blocks.push_back(std::move(block));
    }
    return part;
}

struct RunEvent {
    enum class Type { evaluation, sync };

    Type type = Type::evaluation;
    std::int64_t eval_index = -1;  // evaluations
    int cycle = 0;                 // 0 = warm-up
    int block = -1;
    std::string tag;
    ParameterVector theta;  // evaluations
    double y = 0.0;
    double best_after = 0.0;
    int improved_blocks = 0;  // sync events
    bool composed = false;    // sync events: composed candidate evaluated
    std::int64_t wall_ms = 0;
};

struct CurvePoint {
    std::int64_t iteration = 0;  // 1-based evaluation count
    double best_tvd = 0.0;
    std::int64_t evals = 0;
    std::int64_t shots_cum = 0;
    std::int64_t wall_ms = 0;
};

struct PhaseTimes {
    double warmup_ms = 0.0;
    double fit_ms = 0.0;
    double propose_ms = 0.0;
    double evaluate_ms = 0.0;
    double sync_ms = 0.0;
};

struct RunResult {
    ParameterVector theta_best;
    double y_best = std::numeric_limits<double>::infinity();
    EvaluationDataset dataset;
    std::vector<CurvePoint> curve;
    std::vector<RunEvent> events;
    std::int64_t evaluations = 0;
    std::int64_t shots_total = 0;
    double wall_ms_total = 0.0;
    PhaseTimes phases;
};

/// A loss observation: pure in (theta, seed), safe for concurrent calls.
using LossFn = std::function<double(const ParameterVector&, std::uint64_t)>;

/// One observation of the state-preparation loss: simulate the ansatz at
/// theta, optionally sample shots, and return the TVD against the target's
/// exact reference distribution.
inline double evaluate_loss(const TargetSpec& target, const AnsatzSpec& spec,
                            const ParameterVector& theta, std::int64_t shots,
                            std::uint64_t seed) {
    ProbabilityDistribution p = output_distribution(simulate(spec, theta));
    if (shots > 0) {
        p = sample_shots(p, shots, seed);
    }
    return tvd(p, target.exact_distribution);
}

inline LossFn make_tvd_evaluator(const TargetSpec& target, const AnsatzSpec& spec,
                                 std::int64_t shots) {
    if (target.n_qubits != spec.n_qubits) {
        throw config_error("target and ansatz qubit counts differ");
    }
    return [target, spec, shots](const ParameterVector& theta, std::uint64_t seed) {
        return evaluate_loss(target, spec, theta, shots, seed);
    };
}

namespace detail {

// Stream labels for derived seeds.
inline constexpr std::uint64_t kWarmupStream = 0x11AB;
inline constexpr std::uint64_t kEvalStream = 0x22CD;
inline constexpr std::uint64_t kNoiseStream = 0x33EF;
inline constexpr std::uint64_t kProposeStream = 0x4401;
inline constexpr std::uint64_t kQrfFitStream = 0x5523;
inline constexpr std::uint64_t kPartitionStream = 0x6645;

struct GbrtFitter {
    GbrtParams params;
    using Model = BoostedEnsemble;
    Model operator()(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                     std::uint64_t) const {
        return fit_gbrt(X, y, params);
    }
};

struct QrfFitter {
    QrfParams params;
    using Model = QuantileForest;
    Model operator()(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                     std::uint64_t seed) const {
        // The forest needs two records; fall back to a duplicated row while
        // the dataset is a single warm-up point.
        if (X.size() == 1) {
            std::vector<std::vector<double>> X2{X[0], X[0]};
            std::vector<double> y2{y[0], y[0]};
            return fit_qrf(X2, y2, params, seed);
        }
        return fit_qrf(X, y, params, seed);
    }
};

struct BlockProposal {
    ParameterVector theta;
    double y = 0.0;
    std::int64_t eval_index = -1;
};

struct BlockOutcome {
    int block = -1;
    std::vector<BlockProposal> proposals;
    double fit_ms = 0.0;
    double propose_ms = 0.0;
    double evaluate_ms = 0.0;
};

inline std::vector<double> project(const ParameterVector& theta,
                                   const std::vector<std::size_t>& block) {
    std::vector<double> x(block.size());
    for (std::size_t k = 0; k < block.size(); ++k) {
        x[k] = theta[block[k]];
    }
    return x;
}

template <class Clock = std::chrono::steady_clock>
double ms_since(typename Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Worker body: a pure function of the snapshot. It evaluates its reserved
/// slots [base_eval_index, base_eval_index + inner_iters) and returns the
/// proposals; the coordinator appends them in block order at the barrier,
/// so concurrent and sequential execution produce identical traces.
template <class Fitter, class EvalFn>
BlockOutcome optimize_block_impl(const EvaluationDataset& snapshot,
                                 const ParameterVector& incumbent,
                                 double y_best,
                                 const std::vector<std::size_t>& block,
                                 int block_id,
                                 int cycle,
                                 int inner_iters,
                                 std::int64_t base_eval_index,
                                 const RunConfig& cfg,
                                 const Fitter& fitter,
                                 const EvalFn& evaluate) {
    BlockOutcome out;
    out.block = block_id;

    std::vector<std::vector<double>> X;
    std::vector<double> y;
    if (cfg.surrogate.scope == SurrogateConfig::TrainScope::all_records) {
        X = snapshot.features(block);
        y = snapshot.responses();
    } else {
        // Epoch scope: start from the incumbent only; own proposals extend it.
        X.push_back(project(incumbent, block));
        y.push_back(y_best);
    }

    double f_best = y_best;
    // Perturbation candidates track the worker's own best point so far;
    // off-block coordinates always stay pinned to the snapshot incumbent.
    SubBox domain{incumbent, block};
    for (int j = 0; j < inner_iters; ++j) {
        const auto ids = std::initializer_list<std::uint64_t>{
            cfg.seed, kQrfFitStream, static_cast<std::uint64_t>(cycle),
            static_cast<std::uint64_t>(block_id), static_cast<std::uint64_t>(j)};

        auto t_fit = std::chrono::steady_clock::now();
        const typename Fitter::Model model = fitter(X, y, derive_seed(ids));
        out.fit_ms += ms_since(t_fit);

        Rng propose_rng(derive_seed({cfg.seed, kProposeStream, static_cast<std::uint64_t>(cycle),
                                     static_cast<std::uint64_t>(block_id),
                                     static_cast<std::uint64_t>(j)}));
        auto t_prop = std::chrono::steady_clock::now();
        const ParameterVector theta =
            propose_next(model, X, y, domain, cfg.acquisition, f_best,
                         static_cast<std::int64_t>(y.size()), propose_rng);
        out.propose_ms += ms_since(t_prop);

        const std::int64_t eval_index = base_eval_index + j;
        auto t_eval = std::chrono::steady_clock::now();
        const double observed = evaluate(theta, eval_index);
        out.evaluate_ms += ms_since(t_eval);

        out.proposals.push_back(BlockProposal{theta, observed, eval_index});
        X.push_back(project(theta, block));
        y.push_back(observed);
        if (observed < f_best) {
            f_best = observed;
            domain.base = theta;
        }
    }
    return out;
}

struct SyncPlan {
    const BlockProposal* best_single = nullptr;
    std::vector<int> improved_blocks;
    std::optional<ParameterVector> composed;
};

/// Decides the synchronization outcome for one cycle: the best single
/// proposal, which blocks improved on the snapshot incumbent, and (when at
/// least two did) the coordinate-disjoint composition of their block
/// updates.
inline SyncPlan plan_synchronize(const ParameterVector& incumbent, double y_best,
                                 const std::vector<BlockOutcome>& outcomes,
                                 const LayerPartition& partition) {
    SyncPlan plan;
    std::vector<const BlockProposal*> block_best(partition.blocks.size(), nullptr);
    for (const BlockOutcome& out : outcomes) {
        for (const BlockProposal& p : out.proposals) {
            auto*& bb = block_best[static_cast<std::size_t>(out.block)];
            if (bb == nullptr || p.y < bb->y) {
                bb = &p;
            }
            if (plan.best_single == nullptr || p.y < plan.best_single->y) {
                plan.best_single = &p;
            }
        }
    }
    for (std::size_t b = 0; b < block_best.size(); ++b) {
        if (block_best[b] != nullptr && block_best[b]->y < y_best) {
            plan.improved_blocks.push_back(static_cast<int>(b));
        }
    }
    if (plan.improved_blocks.size() >= 2) {
        ParameterVector composed = incumbent;
        for (int b : plan.improved_blocks) {
            for (std::size_t k : partition.blocks[static_cast<std::size_t>(b)]) {
                composed.set(k, block_best[static_cast<std::size_t>(b)]->theta[k]);
            }
        }
        plan.composed = std::move(composed);
    }
    return plan;
}

template <class Fitter>
RunResult run_loop(std::size_t dimension, const LossFn& loss,
                   const std::vector<std::vector<std::size_t>>& layerwise_blocks,
                   const RunConfig& cfg, const Fitter& fitter) {
    const auto t_start = std::chrono::steady_clock::now();
    RunResult result;
    result.dataset = EvaluationDataset(dimension);

    auto evaluate = [&](const ParameterVector& theta, std::int64_t eval_index) {
        double y = loss(theta, derive_seed({cfg.seed, kEvalStream,
                                            static_cast<std::uint64_t>(eval_index)}));
        if (cfg.noise_sigma > 0.0) {
            Rng noise(derive_seed({cfg.seed, kNoiseStream,
                                   static_cast<std::uint64_t>(eval_index)}));
            y += noise.uniform(-cfg.noise_sigma, cfg.noise_sigma);
        }
        return y;
    };

    double running_best = std::numeric_limits<double>::infinity();
    auto record = [&](const ParameterVector& theta, double y, int cycle, int block,
                      const std::string& tag) {
        const std::int64_t eval_index = static_cast<std::int64_t>(result.dataset.size());
        result.dataset.append(theta, y, tag);
        running_best = std::min(running_best, y);
        result.shots_total += cfg.shots > 0 ? cfg.shots : 0;

        RunEvent ev;
        ev.type = RunEvent::Type::evaluation;
        ev.eval_index = eval_index;
        ev.cycle = cycle;
        ev.block = block;
        ev.tag = tag;
        ev.theta = theta;
        ev.y = y;
        ev.best_after = running_best;
        ev.wall_ms = static_cast<std::int64_t>(ms_since(t_start));
        result.events.push_back(std::move(ev));

        CurvePoint pt;
        pt.iteration = eval_index + 1;
        pt.best_tvd = running_best;
        pt.evals = eval_index + 1;
        pt.shots_cum = result.shots_total;
        pt.wall_ms = static_cast<std::int64_t>(ms_since(t_start));
        result.curve.push_back(pt);
    };

    const bool capped = cfg.max_evals > 0;
    auto remaining = [&]() -> std::int64_t {
        return capped ? cfg.max_evals - static_cast<std::int64_t>(result.dataset.size())
                      : std::numeric_limits<std::int64_t>::max();
    };

    // Warm-up: uniform draws over the full space.
    {
        auto t_warm = std::chrono::steady_clock::now();
        const int n_init = cfg.resolved_n_init(dimension);
        for (int i = 0; i < n_init && remaining() > 0; ++i) {
            Rng draw(derive_seed({cfg.seed, kWarmupStream, static_cast<std::uint64_t>(i)}));
            const ParameterVector theta = ParameterVector::random(dimension, draw);
            const double y = evaluate(theta, static_cast<std::int64_t>(result.dataset.size()));
            record(theta, y, 0, -1, "warmup");
        }
        result.phases.warmup_ms = ms_since(t_warm);
    }

    // Incumbent after warm-up (first minimum wins ties).
    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < result.dataset.size(); ++i) {
        if (result.dataset[i].y < result.dataset[best_idx].y) {
            best_idx = i;
        }
    }
    ParameterVector incumbent = result.dataset[best_idx].theta;
    double y_best = result.dataset[best_idx].y;

    LayerPartition partition;
    switch (cfg.mode) {
        case PartitionMode::full: {
            std::vector<std::size_t> all(dimension);
            std::iota(all.begin(), all.end(), std::size_t{0});
            partition.blocks.push_back(std::move(all));
            break;
        }
        case PartitionMode::layerwise:
            if (layerwise_blocks.empty()) {
                throw config_error("layerwise mode needs the ansatz layer blocks");
            }
            partition.blocks = layerwise_blocks;
            break;
        case PartitionMode::random_subspace:
            partition = random_partition(dimension, cfg.block_size,
                                         derive_seed({cfg.seed, kPartitionStream, 0}));
            break;
    }

    for (int cycle = 1; cycle <= cfg.budget_cycles && remaining() > 0; ++cycle) {
        if (cfg.mode == PartitionMode::random_subspace && cfg.reshuffle_each_cycle) {
            partition = random_partition(
                dimension, cfg.block_size,
                derive_seed({cfg.seed, kPartitionStream, static_cast<std::uint64_t>(cycle)}));
        }

        const EvaluationDataset& snapshot = result.dataset;  // frozen until the barrier
        const std::int64_t base = static_cast<std::int64_t>(snapshot.size());
        const int n_blocks = static_cast<int>(partition.blocks.size());

        // Pre-assigned evaluation slots keep seeds independent of thread
        // scheduling; the cap trims trailing blocks deterministically.
        std::vector<int> iters(static_cast<std::size_t>(n_blocks), cfg.inner_iters);
        if (capped) {
            std::int64_t left = remaining();
            for (int b = 0; b < n_blocks; ++b) {
                iters[static_cast<std::size_t>(b)] =
                    static_cast<int>(std::min<std::int64_t>(cfg.inner_iters, std::max<std::int64_t>(left, 0)));
                left -= iters[static_cast<std::size_t>(b)];
            }
        }
        std::vector<std::int64_t> bases(static_cast<std::size_t>(n_blocks), base);
        for (int b = 1; b < n_blocks; ++b) {
            bases[static_cast<std::size_t>(b)] =
                bases[static_cast<std::size_t>(b - 1)] + iters[static_cast<std::size_t>(b - 1)];
        }

        std::vector<BlockOutcome> outcomes(static_cast<std::size_t>(n_blocks));
        auto run_block = [&](int b) {
            return optimize_block_impl(snapshot, incumbent, y_best, partition.blocks[static_cast<std::size_t>(b)],
                                       b, cycle, iters[static_cast<std::size_t>(b)],
                                       bases[static_cast<std::size_t>(b)], cfg, fitter, evaluate);
        };
        if (cfg.parallel_workers && n_blocks > 1) {
            std::vector<std::future<BlockOutcome>> futures;
            futures.reserve(static_cast<std::size_t>(n_blocks));
            for (int b = 0; b < n_blocks; ++b) {
                futures.push_back(std::async(std::launch::async, run_block, b));
            }
            for (int b = 0; b < n_blocks; ++b) {
                outcomes[static_cast<std::size_t>(b)] = futures[static_cast<std::size_t>(b)].get();
            }
        } else {
            for (int b = 0; b < n_blocks; ++b) {
                outcomes[static_cast<std::size_t>(b)] = run_block(b);
            }
        }

        // Barrier: append every block's evaluations in block order.
        for (const BlockOutcome& out : outcomes) {
            result.phases.fit_ms += out.fit_ms;
            result.phases.propose_ms += out.propose_ms;
            result.phases.evaluate_ms += out.evaluate_ms;
            for (const BlockProposal& p : out.proposals) {
                record(p.theta, p.y, cycle, out.block,
                       "block:" + std::to_string(out.block));
            }
        }

        // Synchronize: adopt the best single proposal; when several blocks
        // improved, also try their composition (coordinate-disjoint merge)
        // and keep whichever candidate is lower.
        auto t_sync = std::chrono::steady_clock::now();
        const SyncPlan plan = plan_synchronize(incumbent, y_best, outcomes, partition);

        RunEvent sync_ev;
        sync_ev.type = RunEvent::Type::sync;
        sync_ev.cycle = cycle;
        sync_ev.improved_blocks = static_cast<int>(plan.improved_blocks.size());

        ParameterVector candidate_theta;
        double candidate_y = std::numeric_limits<double>::infinity();
        if (plan.best_single != nullptr && plan.best_single->y < y_best) {
            candidate_theta = plan.best_single->theta;
            candidate_y = plan.best_single->y;
        }
        if (plan.composed.has_value() && remaining() > 0) {
            const double y_comp =
                evaluate(*plan.composed, static_cast<std::int64_t>(result.dataset.size()));
            record(*plan.composed, y_comp, cycle, -1, "sync");
            sync_ev.composed = true;
            if (y_comp < candidate_y) {
                candidate_theta = *plan.composed;
                candidate_y = y_comp;
            }
        }
        if (candidate_y < y_best) {
            incumbent = candidate_theta;
            y_best = candidate_y;
        }
        sync_ev.best_after = y_best;
        result.events.push_back(std::move(sync_ev));
        result.phases.sync_ms += ms_since(t_sync);
    }

    result.theta_best = incumbent;
    result.y_best = y_best;
    result.evaluations = static_cast<std::int64_t>(result.dataset.size());
    result.wall_ms_total = ms_since(t_start);
    return result;
}

}  // namespace detail

/// Runs the surrogate-guided loop against an arbitrary loss. layerwise
/// mode requires the caller's coordinate blocks (usually the ansatz layer
/// blocks); the other modes ignore them.
inline RunResult run_optimization(std::size_t dimension, const LossFn& loss,
                                  const std::vector<std::vector<std::size_t>>& layerwise_blocks,
                                  const RunConfig& cfg) {
    cfg.validate(dimension);
    if (cfg.surrogate.kind == SurrogateConfig::Kind::gbrt) {
        return detail::run_loop(dimension, loss, layerwise_blocks, cfg,
                                detail::GbrtFitter{cfg.surrogate.gbrt_params()});
    }
    return detail::run_loop(dimension, loss, layerwise_blocks, cfg,
                            detail::QrfFitter{cfg.surrogate.qrf_params()});
}

/// End-to-end state preparation: warm-up, then budget_cycles rounds of
/// per-block proposal/evaluation with synchronization barriers, returning
/// the best record found. Fully reproducible per seed; the concurrent and
/// sequential worker modes produce identical traces.
inline RunResult run_surrogate_prep(const TargetSpec& target, const AnsatzSpec& spec,
                                    const RunConfig& cfg) {
    const std::size_t d = static_cast<std::size_t>(spec.param_count());
    cfg.validate(d);
    const LossFn loss = make_tvd_evaluator(target, spec, cfg.shots);
    return run_optimization(d, loss, layer_blocks(spec), cfg);
}

}  // namespace treeprep
