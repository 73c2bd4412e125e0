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

#include <map>

#include "treeprep/optimizer.hpp"

using namespace treeprep;

namespace {

RunConfig small_config(std::uint64_t seed) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.n_init = 6;
    cfg.budget_cycles = 4;
    cfg.inner_iters = 3;
    cfg.surrogate.n_trees = 25;
    cfg.acquisition.n_candidates = 128;
    return cfg;
}

bool same_traces(const RunResult& a, const RunResult& b) {
    if (a.dataset.size() != b.dataset.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.dataset.size(); ++i) {
        if (!(a.dataset[i].theta == b.dataset[i].theta) || a.dataset[i].y != b.dataset[i].y ||
            a.dataset[i].tag != b.dataset[i].tag) {
            return false;
        }
    }
    return a.y_best == b.y_best && a.theta_best == b.theta_best;
}

}  // namespace

TEST_CASE("evaluate_loss fundamentals") {
    const auto target = make_vqe(2, 2, 5);
    const auto spec = build_ansatz(2, 2, RotationSet::ry_rz());

    // At the hidden generating point the loss is exactly zero.
    CHECK(evaluate_loss(target, spec, *target.hidden_theta, 0, 0) == 0.0);

    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const double y = evaluate_loss(target, spec, ParameterVector::random(8, rng), 0, 0);
        CHECK(y >= 0.0);
        CHECK(y <= 1.0);
    }
}

TEST_CASE("one-qubit loss matches the analytic cosine formula") {
    Rng rng(9);
    const auto spec = build_ansatz(1, 1, RotationSet::ry_only());
    for (int trial = 0; trial < 25; ++trial) {
        const double alpha = rng.uniform(0.0, kTwoPi);
        const double beta = rng.uniform(0.0, kTwoPi);
        TargetSpec target;
        target.n_qubits = 1;
        target.exact_distribution = output_distribution(simulate(spec, ParameterVector({alpha})));
        const double expected =
            std::abs(std::cos(alpha / 2) * std::cos(alpha / 2) -
                     std::cos(beta / 2) * std::cos(beta / 2));
        CHECK(evaluate_loss(target, spec, ParameterVector({beta}), 0, 0) ==
              Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("warm-up seeds the dataset and the incumbent") {
    const auto target = make_vqe(2, 1, 3);
    const auto spec = build_ansatz(2, 1, RotationSet::ry_rz());
    RunConfig cfg = small_config(11);
    cfg.n_init = 1;
    cfg.budget_cycles = 0;

    const auto result = run_surrogate_prep(target, spec, cfg);
    CHECK(result.dataset.size() == 1);
    CHECK(result.y_best == result.dataset[0].y);
    CHECK(result.theta_best == result.dataset[0].theta);
    CHECK(result.dataset[0].tag == "warmup");

    // With more draws the incumbent is the minimum of the warm-up batch.
    cfg.n_init = 8;
    const auto more = run_surrogate_prep(target, spec, cfg);
    double lowest = 1.0;
    for (std::size_t i = 0; i < more.dataset.size(); ++i) {
        lowest = std::min(lowest, more.dataset[i].y);
    }
    CHECK(more.y_best == lowest);

    // Warm-up draws are reproducible.
    const auto again = run_surrogate_prep(target, spec, cfg);
    CHECK(same_traces(more, again));
}

TEST_CASE("block proposals only move their own coordinates") {
    const auto target = make_vqe(2, 2, 19);
    const auto spec = build_ansatz(2, 2, RotationSet::ry_rz());
    RunConfig cfg = small_config(13);
    const auto result = run_surrogate_prep(target, spec, cfg);
    const auto blocks = layer_blocks(spec);

    // Reconstruct the incumbent at each cycle start: the running argmin up
    // to the last evaluation of the previous cycle.
    std::map<int, ParameterVector> incumbent_at_cycle;
    {
        double best = std::numeric_limits<double>::infinity();
        ParameterVector best_theta;
        int last_cycle = 0;
        for (const auto& ev : result.events) {
            if (ev.type != RunEvent::Type::evaluation) {
                continue;
            }
            if (ev.cycle != last_cycle) {
                for (int c = last_cycle + 1; c <= ev.cycle; ++c) {
                    incumbent_at_cycle.emplace(c, best_theta);
                }
                last_cycle = ev.cycle;
            }
            if (ev.y < best) {
                best = ev.y;
                best_theta = ev.theta;
            }
        }
    }

    for (const auto& ev : result.events) {
        if (ev.type != RunEvent::Type::evaluation || ev.block < 0) {
            continue;
        }
        const auto& incumbent = incumbent_at_cycle.at(ev.cycle);
        const auto& block = blocks[static_cast<std::size_t>(ev.block)];
        for (std::size_t k = 0; k < ev.theta.size(); ++k) {
            const bool in_block = std::find(block.begin(), block.end(), k) != block.end();
            if (!in_block) {
                CHECK(ev.theta[k] == incumbent[k]);
            }
        }
    }
}

TEST_CASE("layerwise with one layer reproduces full-space traces") {
    const auto target = make_vqe(3, 1, 23);
    const auto spec = build_ansatz(3, 1, RotationSet::ry_rz());

    RunConfig layer_cfg = small_config(29);
    layer_cfg.mode = PartitionMode::layerwise;
    RunConfig full_cfg = layer_cfg;
    full_cfg.mode = PartitionMode::full;

    const auto a = run_surrogate_prep(target, spec, layer_cfg);
    const auto b = run_surrogate_prep(target, spec, full_cfg);
    CHECK(same_traces(a, b));
}

TEST_CASE("concurrent and sequential workers produce identical traces") {
    const auto target = make_rqc(3, 10, 31);
    const auto spec = build_ansatz(3, 3, RotationSet::ry_rz());
    RunConfig cfg = small_config(37);
    cfg.shots = 100;

    cfg.parallel_workers = true;
    const auto concurrent = run_surrogate_prep(target, spec, cfg);
    cfg.parallel_workers = false;
    const auto sequential = run_surrogate_prep(target, spec, cfg);
    CHECK(same_traces(concurrent, sequential));
}

TEST_CASE("the best-so-far curve never increases") {
    const auto target = make_rqc(2, 8, 41);
    const auto spec = build_ansatz(2, 2, RotationSet::ry_rz());
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        RunConfig cfg = small_config(seed);
        cfg.shots = 50;
        const auto result = run_surrogate_prep(target, spec, cfg);
        for (std::size_t i = 1; i < result.curve.size(); ++i) {
            CHECK(result.curve[i].best_tvd <= result.curve[i - 1].best_tvd);
            CHECK(result.curve[i].iteration == result.curve[i - 1].iteration + 1);
        }
        CHECK(result.evaluations == static_cast<std::int64_t>(result.dataset.size()));
        CHECK(result.curve.size() == result.dataset.size());
    }
}

TEST_CASE("every evaluation is logged exactly once") {
    const auto target = make_vqe(2, 2, 43);
    const auto spec = build_ansatz(2, 2, RotationSet::ry_rz());
    RunConfig cfg = small_config(47);
    const auto result = run_surrogate_prep(target, spec, cfg);

    std::size_t eval_events = 0;
    std::int64_t next_index = 0;
    for (const auto& ev : result.events) {
        if (ev.type == RunEvent::Type::evaluation) {
            CHECK(ev.eval_index == next_index);
            ++next_index;
            ++eval_events;
        }
    }
    CHECK(eval_events == result.dataset.size());
}

TEST_CASE("t = 0 returns the warm-up best") {
    const auto target = make_vqe(2, 1, 51);
    const auto spec = build_ansatz(2, 1, RotationSet::ry_rz());
    RunConfig cfg = small_config(3);
    cfg.budget_cycles = 0;
    const auto result = run_surrogate_prep(target, spec, cfg);
    CHECK(result.dataset.size() == static_cast<std::size_t>(cfg.n_init));
}

TEST_CASE("composition merges improved blocks on a separable objective") {
    // f(theta) = sum over two blocks of the distance of each coordinate to
    // its own optimum, normalized; exactly separable across blocks.
    const std::vector<double> optimum{1.0, 2.0, 3.0, 4.0};
    const LossFn loss = [&](const ParameterVector& theta, std::uint64_t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            acc += std::abs(theta[k] - optimum[k]);
        }
        return acc / (4.0 * kTwoPi);
    };
    const std::vector<std::vector<std::size_t>> blocks{{0, 1}, {2, 3}};

    RunConfig cfg = small_config(61);
    cfg.budget_cycles = 6;
    const auto result = run_optimization(4, loss, blocks, cfg);

    // The composed candidate's loss must equal the separable sum: the
    // snapshot incumbent's loss plus each improved block's delta. Verify on
    // every sync evaluation.
    bool saw_composed = false;
    for (const auto& ev : result.events) {
        if (ev.type == RunEvent::Type::evaluation && ev.tag == "sync") {
            saw_composed = true;
            // Separability: evaluating the merge equals merging the parts.
            double manual = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                manual += std::abs(ev.theta[k] - optimum[k]);
            }
            CHECK(ev.y == Catch::Approx(manual / (4.0 * kTwoPi)).margin(1e-15));
        }
    }
    CHECK(saw_composed);  // with a separable loss both blocks improve early
    // And the optimizer actually makes progress on it.
    CHECK(result.y_best < result.dataset[0].y);
}

TEST_CASE("synchronization planning rules") {
    using detail::BlockOutcome;
    using detail::BlockProposal;
    using detail::plan_synchronize;

    LayerPartition partition;
    partition.blocks = {{0, 1}, {2, 3}};
    const ParameterVector incumbent({0.1, 0.2, 0.3, 0.4});
    const double y_best = 0.5;

    SECTION("no block improved") {
        std::vector<BlockOutcome> outcomes(2);
        outcomes[0].block = 0;
        outcomes[0].proposals = {{ParameterVector({1.0, 1.0, 0.3, 0.4}), 0.9, 6}};
        outcomes[1].block = 1;
        outcomes[1].proposals = {{ParameterVector({0.1, 0.2, 1.0, 1.0}), 0.8, 7}};
        const auto plan = plan_synchronize(incumbent, y_best, outcomes, partition);
        CHECK(plan.improved_blocks.empty());
        CHECK_FALSE(plan.composed.has_value());
        REQUIRE(plan.best_single != nullptr);
        CHECK(plan.best_single->y == 0.8);
    }

    SECTION("exactly one block improved") {
        std::vector<BlockOutcome> outcomes(2);
        outcomes[0].block = 0;
        outcomes[0].proposals = {{ParameterVector({1.0, 1.0, 0.3, 0.4}), 0.3, 6}};
        outcomes[1].block = 1;
        outcomes[1].proposals = {{ParameterVector({0.1, 0.2, 1.0, 1.0}), 0.8, 7}};
        const auto plan = plan_synchronize(incumbent, y_best, outcomes, partition);
        CHECK(plan.improved_blocks == std::vector<int>{0});
        CHECK_FALSE(plan.composed.has_value());
        CHECK(plan.best_single->y == 0.3);
    }

    SECTION("two improved blocks compose coordinate-wise") {
        std::vector<BlockOutcome> outcomes(2);
        outcomes[0].block = 0;
        outcomes[0].proposals = {{ParameterVector({1.0, 1.1, 0.3, 0.4}), 0.3, 6}};
        outcomes[1].block = 1;
        outcomes[1].proposals = {{ParameterVector({0.1, 0.2, 2.0, 2.1}), 0.4, 7}};
        const auto plan = plan_synchronize(incumbent, y_best, outcomes, partition);
        CHECK(plan.improved_blocks.size() == 2);
        REQUIRE(plan.composed.has_value());
        CHECK((*plan.composed)[0] == 1.0);
        CHECK((*plan.composed)[1] == 1.1);
        CHECK((*plan.composed)[2] == 2.0);
        CHECK((*plan.composed)[3] == 2.1);
    }
}

TEST_CASE("random partitions are disjoint covers with block-size bounds") {
    CHECK_THROWS_AS(random_partition(4, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_partition(4, 5, 1), std::invalid_argument);

    const auto whole = random_partition(6, 6, 2);
    REQUIRE(whole.blocks.size() == 1);
    CHECK(whole.blocks[0].size() == 6);

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 3 + rng.below(10);
        const int bs = 1 + static_cast<int>(rng.below(d));
        const auto part = random_partition(d, bs, trial);
        std::set<std::size_t> seen;
        for (const auto& block : part.blocks) {
            CHECK(block.size() <= static_cast<std::size_t>(bs));
            for (std::size_t k : block) {
                CHECK(seen.insert(k).second);
            }
        }
        CHECK(seen.size() == d);
    }
}

TEST_CASE("random partitions are uniform over outcomes (chi-square)") {
    // d = 4, block size 2: six equally likely ordered partitions.
    std::map<std::string, int> counts;
    const int draws = 10000;
    for (int seed = 0; seed < draws; ++seed) {
        const auto part = random_partition(4, 2, static_cast<std::uint64_t>(seed));
        std::string key;
        for (const auto& block : part.blocks) {
            for (std::size_t k : block) {
                key += std::to_string(k);
            }
            key += '|';
        }
        ++counts[key];
    }
    REQUIRE(counts.size() == 6);
    const double expected = draws / 6.0;
    double chi_sq = 0.0;
    for (const auto& [key, n] : counts) {
        chi_sq += (n - expected) * (n - expected) / expected;
    }
    // df = 5; 20.5 is the 0.1% tail.
    CHECK(chi_sq < 25.0);
}

TEST_CASE("injected noise is centered") {
    const auto target = make_vqe(2, 1, 67);
    const auto spec = build_ansatz(2, 1, RotationSet::ry_rz());
    RunConfig cfg = small_config(71);
    cfg.noise_sigma = 0.1;
    cfg.budget_cycles = 10;
    const auto result = run_surrogate_prep(target, spec, cfg);

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < result.dataset.size(); ++i) {
        const double f = evaluate_loss(target, spec, result.dataset[i].theta, 0, 0);
        const double xi = result.dataset[i].y - f;
        CHECK(std::abs(xi) <= 0.1 + 1e-12);
        sum += xi;
        sum_sq += xi * xi;
    }
    const double n = static_cast<double>(result.dataset.size());
    const double mean = sum / n;
    const double se = std::sqrt(std::max(sum_sq / n - mean * mean, 1e-12) / n);
    CHECK(std::abs(mean) <= 3.0 * se + 1e-3);
}

TEST_CASE("configuration errors surface before any evaluation") {
    const auto target = make_vqe(2, 1, 3);
    const auto spec = build_ansatz(2, 1, RotationSet::ry_rz());
    RunConfig cfg = small_config(1);
    cfg.mode = PartitionMode::random_subspace;
    cfg.block_size = 99;
    CHECK_THROWS_AS(run_surrogate_prep(target, spec, cfg), config_error);

    cfg = small_config(1);
    cfg.inner_iters = 0;
    CHECK_THROWS_AS(run_surrogate_prep(target, spec, cfg), config_error);

    cfg = small_config(1);
    cfg.shots = -5;
    CHECK_THROWS_AS(run_surrogate_prep(target, spec, cfg), config_error);

    // Mismatched qubit counts are a config error too.
    cfg = small_config(1);
    const auto wrong_target = make_vqe(3, 1, 3);
    CHECK_THROWS_AS(run_surrogate_prep(wrong_target, spec, cfg), config_error);
}

TEST_CASE("evaluation cap truncates the run deterministically") {
    const auto target = make_vqe(2, 2, 5);
    const auto spec = build_ansatz(2, 2, RotationSet::ry_rz());
    RunConfig cfg = small_config(7);
    cfg.budget_cycles = 100;
    cfg.max_evals = 20;
    const auto a = run_surrogate_prep(target, spec, cfg);
    CHECK(a.evaluations == 20);
    cfg.parallel_workers = false;
    const auto b = run_surrogate_prep(target, spec, cfg);
    CHECK(same_traces(a, b));
}

TEST_CASE("a one-index block reaches the analytic optimum within 50 inner iterations") {
    // One-qubit known-optimum fixture, optimized through a single-coordinate
    // block; the best proposal must approach the grid-search optimum.
    const auto target = make_qsp(1, QspSource::gaussian, 4242);
    const auto spec = build_ansatz(1, 1, RotationSet::ry_only());
    const LossFn loss = make_tvd_evaluator(target, spec, 0);

    RunConfig cfg;
    cfg.seed = 17;
    cfg.surrogate.n_trees = 50;
    cfg.acquisition.n_candidates = 256;

    EvaluationDataset snapshot(1);
    Rng rng(2);
    ParameterVector incumbent = ParameterVector::random(1, rng);
    double y_best = loss(incumbent, 0);
    snapshot.append(incumbent, y_best, "warmup");

    auto evaluate = [&](const ParameterVector& theta, std::int64_t) {
        return loss(theta, 0);
    };
    const auto outcome = detail::optimize_block_impl(
        snapshot, incumbent, y_best, {0}, 0, 1, 50, 1, cfg,
        detail::GbrtFitter{cfg.surrogate.gbrt_params()}, evaluate);

    double best = y_best;
    for (const auto& p : outcome.proposals) {
        best = std::min(best, p.y);
    }
    // Grid-search oracle over the 1-d domain.
    double grid_best = 1.0;
    for (int i = 0; i < 20000; ++i) {
        grid_best = std::min(grid_best, loss(ParameterVector({kTwoPi * i / 20000.0}), 0));
    }
    CHECK(best <= grid_best + 0.05);
}

TEST_CASE("random-subspace mode runs with and without reshuffling") {
    const auto target = make_vqe(2, 2, 83);
    const auto spec = build_ansatz(2, 2, RotationSet::ry_rz());
    RunConfig cfg = small_config(89);
    cfg.mode = PartitionMode::random_subspace;
    cfg.block_size = 3;
    const auto fixed = run_surrogate_prep(target, spec, cfg);
    CHECK(fixed.y_best <= fixed.dataset[0].y);

    cfg.reshuffle_each_cycle = true;
    const auto reshuffled = run_surrogate_prep(target, spec, cfg);
    CHECK(reshuffled.y_best <= reshuffled.dataset[0].y);
    const auto reshuffled_again = run_surrogate_prep(target, spec, cfg);
    CHECK(same_traces(reshuffled, reshuffled_again));
}

TEST_CASE("observed losses stay in the TVD range without injected noise") {
    const auto target = make_rqc(2, 8, 97);
    const auto spec = build_ansatz(2, 2, RotationSet::ry_rz());
    RunConfig cfg = small_config(101);
    cfg.shots = 50;
    const auto result = run_surrogate_prep(target, spec, cfg);
    for (std::size_t i = 0; i < result.dataset.size(); ++i) {
        CHECK(result.dataset[i].y >= 0.0);
        CHECK(result.dataset[i].y <= 1.0);
    }
}

TEST_CASE("the quantile forest surrogate drives the loop end to end") {
    const auto target = make_vqe(2, 1, 73);
    const auto spec = build_ansatz(2, 1, RotationSet::ry_rz());
    RunConfig cfg = small_config(79);
    cfg.surrogate = SurrogateConfig::defaults(SurrogateConfig::Kind::qrf);
    cfg.budget_cycles = 5;
    const auto result = run_surrogate_prep(target, spec, cfg);
    CHECK(result.evaluations > cfg.n_init);
    CHECK(result.y_best <= result.dataset[0].y);
}
