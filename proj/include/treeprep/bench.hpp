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

// Desk-scale benchmark suites with pinned fixture seeds, so the numbers in
// the repository are reproducible:
//   q1  surrogate comparison (GBRT vs QRF) on three RQC fixtures
//   q2  full-space vs random-subspace vs layerwise on the same fixtures
//   q3  ansatz-layer and shot-budget sweep on the VQE fixture

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "treeprep/harness.hpp"

namespace treeprep {

struct BenchFixtures {
    static constexpr int kQubits = 3;
    static constexpr int kAnsatzLayers = 3;
    static constexpr std::uint64_t kRqcSeeds[3] = {101, 202, 303};
    static constexpr int kRqcGateDepth = 12;
    static constexpr std::uint64_t kVqeSeed = 7;
    static constexpr int kVqeLayers = 3;
    static constexpr std::uint64_t kRunSeeds[5] = {1, 2, 3, 4, 5};
    static constexpr std::int64_t kEvalBudget = 300;
    static constexpr std::int64_t kDefaultShots = 250;
};

struct BenchRow {
    std::string suite;
    std::string fixture;
    std::string variant;
    std::uint64_t seed = 0;
    double best_observed_tvd = 0.0;
    double final_exact_tvd = 0.0;
    std::int64_t evals = 0;
    std::int64_t shots_total = 0;
    std::int64_t wall_ms = 0;
    int depth = 0;
    int cx_count = 0;
};

namespace detail {

inline ExperimentConfig bench_cell_config(const TargetConfig& target, int ansatz_layers,
                                          std::int64_t shots, PartitionMode mode,
                                          SurrogateConfig::Kind surrogate,
                                          std::uint64_t run_seed, const std::string& suite_id) {
    ExperimentConfig cfg;
    cfg.target = target;
    cfg.ansatz.n_qubits = target.n_qubits;
    cfg.ansatz.n_layers = ansatz_layers;
    cfg.run.mode = mode;
    if (mode == PartitionMode::random_subspace) {
        cfg.run.block_size = target.n_qubits * 2;  // same size as a layer block
        cfg.run.reshuffle_each_cycle = true;
    }
    cfg.run.budget_cycles = 100000;  // the evaluation cap is the binding budget
    cfg.run.max_evals = BenchFixtures::kEvalBudget;
    cfg.run.shots = shots;
    cfg.run.seed = run_seed;
    cfg.run.surrogate = SurrogateConfig::defaults(surrogate);
    cfg.run.parallel_workers = false;  // cells run concurrently instead
    cfg.suite_id = suite_id;
    return cfg;
}

inline BenchRow run_bench_cell(const ExperimentConfig& cfg, const std::string& suite,
                               const std::string& fixture, const std::string& variant) {
    const SynthOutcome outcome = run_synth(cfg);
    BenchRow row;
    row.suite = suite;
    row.fixture = fixture;
    row.variant = variant;
    row.seed = cfg.run.seed;
    row.best_observed_tvd = outcome.result.y_best;
    row.final_exact_tvd = outcome.best_exact_tvd;
    row.evals = outcome.result.evaluations;
    row.shots_total = outcome.result.shots_total;
    row.wall_ms = static_cast<std::int64_t>(outcome.result.wall_ms_total);
    row.depth = outcome.metrics.depth;
    row.cx_count = outcome.metrics.cx_count;
    return row;
}

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(count)));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                fn(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

inline double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) {
        acc += x;
    }
    return acc / static_cast<double>(v.size());
}

inline double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) {
        acc += (x - m) * (x - m);
    }
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// The three pinned RQC targets of the q1/q2 suites.
inline std::vector<TargetConfig> bench_rqc_fixtures() {
    std::vector<TargetConfig> fixtures;
    for (std::uint64_t seed : BenchFixtures::kRqcSeeds) {
        TargetConfig t;
        t.family = TargetFamily::rqc;
        t.n_qubits = BenchFixtures::kQubits;
        t.seed = seed;
        t.depth = BenchFixtures::kRqcGateDepth;
        fixtures.push_back(t);
    }
    return fixtures;
}

inline TargetConfig bench_vqe_fixture() {
    TargetConfig t;
    t.family = TargetFamily::vqe;
    t.n_qubits = BenchFixtures::kQubits;
    t.seed = BenchFixtures::kVqeSeed;
    t.n_layers = BenchFixtures::kVqeLayers;
    return t;
}

struct BenchCell {
    ExperimentConfig cfg;
    std::string fixture;
    std::string variant;
};

/// Enumerates a suite's cells: one fully-specified experiment per
/// (fixture, variant, run seed).
inline std::vector<BenchCell> bench_suite_cells(const std::string& suite) {
    std::vector<BenchCell> cells;

    if (suite == "q1") {
        for (const TargetConfig& target : bench_rqc_fixtures()) {
            const std::string fixture = "rqc" + std::to_string(target.seed);
            for (const auto kind :
                 {SurrogateConfig::Kind::gbrt, SurrogateConfig::Kind::qrf}) {
                const std::string variant =
                    kind == SurrogateConfig::Kind::gbrt ? "gbrt" : "qrf";
                for (std::uint64_t seed : BenchFixtures::kRunSeeds) {
                    cells.push_back({detail::bench_cell_config(
                                         target, BenchFixtures::kAnsatzLayers,
                                         BenchFixtures::kDefaultShots, PartitionMode::layerwise,
                                         kind, seed, suite),
                                     fixture, variant});
                }
            }
        }
    } else if (suite == "q2") {
        for (const TargetConfig& target : bench_rqc_fixtures()) {
            const std::string fixture = "rqc" + std::to_string(target.seed);
            for (const auto mode : {PartitionMode::full, PartitionMode::random_subspace,
                                    PartitionMode::layerwise}) {
                for (std::uint64_t seed : BenchFixtures::kRunSeeds) {
                    cells.push_back({detail::bench_cell_config(
                                         target, BenchFixtures::kAnsatzLayers,
                                         BenchFixtures::kDefaultShots, mode,
                                         SurrogateConfig::Kind::gbrt, seed, suite),
                                     fixture, to_string(mode)});
                }
            }
        }
    } else if (suite == "q3") {
        const TargetConfig target = bench_vqe_fixture();
        for (int layers : {2, 3, 4, 5}) {
            for (std::int64_t shots : {75, 250, 500, 10000}) {
                const std::string variant =
                    "layers=" + std::to_string(layers) + ",shots=" + std::to_string(shots);
                for (std::uint64_t seed : BenchFixtures::kRunSeeds) {
                    cells.push_back({detail::bench_cell_config(
                                         target, layers, shots, PartitionMode::layerwise,
                                         SurrogateConfig::Kind::gbrt, seed, suite),
                                     "vqe" + std::to_string(target.seed), variant});
                }
            }
        }
    } else {
        throw config_error("unknown bench suite '" + suite + "' (choose q1, q2 or q3)");
    }
    return cells;
}

/// Runs a suite and returns one row per (fixture, variant, seed) cell.
/// Cells execute concurrently; every cell derives its own seeds, so the
/// row values are independent of scheduling.
inline std::vector<BenchRow> run_bench_suite(const std::string& suite) {
    const std::vector<BenchCell> cells = bench_suite_cells(suite);
    std::vector<BenchRow> rows(cells.size());
    detail::parallel_for(cells.size(), [&](std::size_t i) {
        rows[i] = detail::run_bench_cell(cells[i].cfg, suite, cells[i].fixture,
                                         cells[i].variant);
    });
    return rows;
}

inline std::string bench_rows_csv(const std::vector<BenchRow>& rows, bool deterministic) {
    std::string text =
        "suite,fixture,variant,seed,best_observed_tvd,final_exact_tvd,evals,shots_total,"
        "wall_ms,depth,cx_count\n";
    for (const BenchRow& r : rows) {
        text += r.suite + ',' + r.fixture + ',' + r.variant + ',' + std::to_string(r.seed) +
                ',' + detail::fmt_double(r.best_observed_tvd) + ',' +
                detail::fmt_double(r.final_exact_tvd) + ',' + std::to_string(r.evals) + ',' +
                std::to_string(r.shots_total) + ',' +
                std::to_string(deterministic ? 0 : r.wall_ms) + ',' + std::to_string(r.depth) +
                ',' + std::to_string(r.cx_count) + '\n';
    }
    return text;
}

/// Per-(fixture, variant) aggregate of the final exact TVD.
inline std::string bench_summary_csv(const std::vector<BenchRow>& rows) {
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const BenchRow& r : rows) {
        groups[{r.fixture, r.variant}].push_back(r.final_exact_tvd);
    }
    std::string text = "fixture,variant,runs,mean_tvd,std_tvd,median_tvd\n";
    for (const auto& [key, values] : groups) {
        text += key.first + ',' + key.second + ',' + std::to_string(values.size()) + ',' +
                detail::fmt_double(detail::mean_of(values)) + ',' +
                detail::fmt_double(detail::stddev_of(values)) + ',' +
                detail::fmt_double(detail::median_of(values)) + '\n';
    }
    return text;
}

/// Runs a suite and writes rows.csv / summary.csv under out_dir/<suite>/.
inline std::vector<BenchRow> run_bench_and_emit(const std::string& suite,
                                                const std::string& out_dir,
                                                bool deterministic) {
    const std::vector<BenchRow> rows = run_bench_suite(suite);
    namespace fs = std::filesystem;
    const fs::path root = fs::path(out_dir) / suite;
    fs::create_directories(root);
    detail::write_text_file(root / "rows.csv", bench_rows_csv(rows, deterministic));
    detail::write_text_file(root / "summary.csv", bench_summary_csv(rows));
    return rows;
}

}  // namespace treeprep
