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

#include "treeprep/config.hpp"

using namespace treeprep;

namespace {

json minimal_config() {
    return json{{"schema_version", 1},
                {"target", {{"family", "rqc"}, {"n_qubits", 3}, {"seed", 7}, {"depth", 10}}},
                {"ansatz", {{"n_qubits", 3}, {"n_layers", 3}}}};
}

}  // namespace

TEST_CASE("a minimal config parses with defaults everywhere else") {
    const auto cfg = ExperimentConfig::from_json(minimal_config());
    CHECK(cfg.target.family == TargetFamily::rqc);
    CHECK(cfg.target.depth == 10);
    CHECK(cfg.ansatz.n_layers == 3);
    CHECK(cfg.run.mode == PartitionMode::layerwise);
    CHECK(cfg.run.shots == 0);
    CHECK(cfg.run.inner_iters == 3);
    CHECK(cfg.run.acquisition.kind == AcquisitionKind::ei);
    CHECK(cfg.run.acquisition.n_candidates == 512);
    CHECK(cfg.run.surrogate.kind == SurrogateConfig::Kind::gbrt);
    CHECK(cfg.run.surrogate.n_trees == 100);
    CHECK(cfg.run.surrogate.shrinkage == 0.1);
    CHECK_FALSE(cfg.diagnostics.enabled);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("unknown keys are rejected at every level") {
    auto top = minimal_config();
    top["frobnicate"] = 1;
    CHECK_THROWS_AS(ExperimentConfig::from_json(top), config_error);

    auto nested = minimal_config();
    nested["target"]["typo_key"] = 1;
    CHECK_THROWS_AS(ExperimentConfig::from_json(nested), config_error);

    auto run = minimal_config();
    run["run"] = {{"moed", "full"}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(run), config_error);

    auto acq = minimal_config();
    acq["run"] = {{"acquisition", {{"kindd", "ei"}}}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(acq), config_error);

    // Family-specific keys: a qsp target does not take an rqc depth.
    auto family = minimal_config();
    family["target"] = {{"family", "qsp"}, {"n_qubits", 2}, {"depth", 5}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(family), config_error);
}

TEST_CASE("schema version is checked") {
    auto cfg = minimal_config();
    cfg["schema_version"] = 2;
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg), config_error);
    cfg.erase("schema_version");
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg), config_error);
}

TEST_CASE("target and ansatz are required") {
    auto no_target = minimal_config();
    no_target.erase("target");
    CHECK_THROWS_AS(ExperimentConfig::from_json(no_target), config_error);

    auto no_ansatz = minimal_config();
    no_ansatz.erase("ansatz");
    CHECK_THROWS_AS(ExperimentConfig::from_json(no_ansatz), config_error);

    auto no_family = minimal_config();
    no_family["target"].erase("family");
    CHECK_THROWS_AS(ExperimentConfig::from_json(no_family), config_error);
}

TEST_CASE("shots and kappa accept their sentinel spellings") {
    auto cfg = minimal_config();
    cfg["run"] = {{"shots", "exact"}, {"acquisition", {{"kind", "ucb"}, {"kappa", "schedule"}}}};
    const auto parsed = ExperimentConfig::from_json(cfg);
    CHECK(parsed.run.shots == 0);
    CHECK(parsed.run.acquisition.kind == AcquisitionKind::ucb);
    CHECK(parsed.run.acquisition.kappa == 0.0);

    cfg["run"] = {{"shots", 250}, {"acquisition", {{"kappa", 1.5}}}};
    const auto parsed2 = ExperimentConfig::from_json(cfg);
    CHECK(parsed2.run.shots == 250);
    CHECK(parsed2.run.acquisition.kappa == 1.5);

    cfg["run"] = {{"shots", 0}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg), config_error);
    cfg["run"] = {{"shots", "approximate"}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg), config_error);
}

TEST_CASE("surrogate defaults depend on the kind") {
    auto cfg = minimal_config();
    cfg["run"] = {{"surrogate", {{"kind", "qrf"}}}};
    const auto parsed = ExperimentConfig::from_json(cfg);
    CHECK(parsed.run.surrogate.kind == SurrogateConfig::Kind::qrf);
    CHECK(parsed.run.surrogate.n_trees == 50);
    CHECK(parsed.run.surrogate.max_depth == 8);
    CHECK(parsed.run.surrogate.min_samples_leaf == 2);

    cfg["run"] = {{"surrogate", {{"kind", "qrf"}, {"n_trees", 15}}}};
    CHECK(ExperimentConfig::from_json(cfg).run.surrogate.n_trees == 15);
}

TEST_CASE("qsp targets default the search ansatz to Ry only") {
    json cfg{{"schema_version", 1},
             {"target", {{"family", "qsp"}, {"n_qubits", 2}, {"source", "uniform"}}},
             {"ansatz", {{"n_qubits", 2}, {"n_layers", 2}}}};
    const auto parsed = ExperimentConfig::from_json(cfg);
    const auto spec = parsed.build_ansatz_spec();
    CHECK(spec.rotations.ry);
    CHECK_FALSE(spec.rotations.rz);
    CHECK(spec.param_count() == 4);

    // Explicit rotations override the default.
    cfg["ansatz"]["rotations"] = json::array({"ry", "rz"});
    CHECK(ExperimentConfig::from_json(cfg).build_ansatz_spec().param_count() == 8);
}

TEST_CASE("config round-trips through JSON") {
    auto base = minimal_config();
    base["run"] = {{"mode", "random_subspace"}, {"block_size", 4}, {"shots", 300},
                   {"noise_sigma", 0.05}, {"seed", 999}};
    base["diagnostics"] = {{"enabled", true}, {"probe_count", 5000}};
    base["output_dir"] = "runs/example";
    base["suite_id"] = "demo";
    const auto cfg = ExperimentConfig::from_json(base);
    const auto cfg2 = ExperimentConfig::from_json(cfg.to_json());
    CHECK(cfg2.run.mode == PartitionMode::random_subspace);
    CHECK(cfg2.run.block_size == 4);
    CHECK(cfg2.run.shots == 300);
    CHECK(cfg2.run.noise_sigma == 0.05);
    CHECK(cfg2.run.seed == 999);
    CHECK(cfg2.diagnostics.enabled);
    CHECK(cfg2.diagnostics.probe_count == 5000);
    CHECK(cfg2.output_dir == "runs/example");
    CHECK(cfg2.suite_id == "demo");
    CHECK(cfg.to_json() == cfg2.to_json());
}

TEST_CASE("mismatched qubit counts fail validation") {
    auto cfg = minimal_config();
    cfg["ansatz"]["n_qubits"] = 2;
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg).validate(), config_error);
}
