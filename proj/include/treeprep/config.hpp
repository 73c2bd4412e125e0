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

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "treeprep/common.hpp"
#include "treeprep/optimizer.hpp"
#include "treeprep/targets.hpp"

namespace treeprep {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;

namespace detail {

/// Strict-schema helper: every key present must be in the allow list.
inline void check_keys(const json& obj, const std::vector<std::string>& allowed,
                       const std::string& context) {
    if (!obj.is_object()) {
        throw config_error(context + ": expected a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const auto& a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw config_error(context + ": unknown key '" + key + "'");
        }
    }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error("field '" + key + "': " + e.what());
    }
}

}  // namespace detail

struct TargetConfig {
    TargetFamily family = TargetFamily::rqc;
    int n_qubits = 3;
    std::uint64_t seed = 0;
    int depth = 12;                         // rqc
    QspSource source = QspSource::gaussian; // qsp
    int n_layers = 3;                       // vqe

    static TargetConfig from_json(const json& obj) {
        if (!obj.contains("family")) {
            throw config_error("target: missing 'family'");
        }
        TargetConfig cfg;
        const std::string family = obj.at("family").get<std::string>();
        if (family == "rqc") {
            cfg.family = TargetFamily::rqc;
            detail::check_keys(obj, {"family", "n_qubits", "seed", "depth"}, "target(rqc)");
            cfg.depth = detail::get_or(obj, "depth", cfg.depth);
        } else if (family == "qsp") {
            cfg.family = TargetFamily::qsp;
            detail::check_keys(obj, {"family", "n_qubits", "seed", "source"}, "target(qsp)");
            const std::string source = detail::get_or<std::string>(obj, "source", "gaussian");
            if (source == "gaussian") {
                cfg.source = QspSource::gaussian;
            } else if (source == "uniform") {
                cfg.source = QspSource::uniform;
            } else {
                throw config_error("target: unknown qsp source '" + source + "'");
            }
        } else if (family == "vqe") {
            cfg.family = TargetFamily::vqe;
            detail::check_keys(obj, {"family", "n_qubits", "seed", "n_layers"}, "target(vqe)");
            cfg.n_layers = detail::get_or(obj, "n_layers", cfg.n_layers);
        } else {
            throw config_error("target: unknown family '" + family + "'");
        }
        if (!obj.contains("n_qubits")) {
            throw config_error("target: missing 'n_qubits'");
        }
        cfg.n_qubits = obj.at("n_qubits").get<int>();
        cfg.seed = detail::get_or<std::uint64_t>(obj, "seed", 0);
        return cfg;
    }

    json to_json() const {
        json obj{{"family", to_string(family)}, {"n_qubits", n_qubits}, {"seed", seed}};
        switch (family) {
            case TargetFamily::rqc: obj["depth"] = depth; break;
            case TargetFamily::qsp: obj["source"] = to_string(source); break;
            case TargetFamily::vqe: obj["n_layers"] = n_layers; break;
        }
        return obj;
    }

    TargetSpec build() const {
        switch (family) {
            case TargetFamily::rqc: return make_rqc(n_qubits, depth, seed);
            case TargetFamily::qsp: return make_qsp(n_qubits, source, seed);
            case TargetFamily::vqe: return make_vqe(n_qubits, n_layers, seed);
        }
        throw config_error("target: invalid family");
    }
};

struct AnsatzConfig {
    int n_qubits = 3;
    int n_layers = 3;
    std::optional<RotationSet> rotations;  // default: family-dependent

    static AnsatzConfig from_json(const json& obj) {
        detail::check_keys(obj, {"n_qubits", "n_layers", "rotations"}, "ansatz");
        if (!obj.contains("n_qubits") || !obj.contains("n_layers")) {
            throw config_error("ansatz: 'n_qubits' and 'n_layers' are required");
        }
        AnsatzConfig cfg;
        cfg.n_qubits = obj.at("n_qubits").get<int>();
        cfg.n_layers = obj.at("n_layers").get<int>();
        if (obj.contains("rotations")) {
            RotationSet set{false, false};
            for (const auto& r : obj.at("rotations")) {
                const std::string name = r.get<std::string>();
                if (name == "ry") {
                    set.ry = true;
                } else if (name == "rz") {
                    set.rz = true;
                } else {
                    throw config_error("ansatz: unknown rotation '" + name + "'");
                }
            }
            if (set.empty()) {
                throw config_error("ansatz: rotation set must be non-empty");
            }
            cfg.rotations = set;
        }
        return cfg;
    }

    json to_json() const {
        json obj{{"n_qubits", n_qubits}, {"n_layers", n_layers}};
        if (rotations.has_value()) {
            json rot = json::array();
            if (rotations->ry) rot.push_back("ry");
            if (rotations->rz) rot.push_back("rz");
            obj["rotations"] = rot;
        }
        return obj;
    }
};

namespace detail {

inline AcquisitionConfig acquisition_from_json(const json& obj) {
    check_keys(obj, {"kind", "kappa", "n_candidates", "sigma_prop"}, "acquisition");
    AcquisitionConfig cfg;
    const std::string kind = get_or<std::string>(obj, "kind", "ei");
    if (kind == "ei") {
        cfg.kind = AcquisitionKind::ei;
    } else if (kind == "ucb") {
        cfg.kind = AcquisitionKind::ucb;
    } else {
        throw config_error("acquisition: unknown kind '" + kind + "'");
    }
    if (obj.contains("kappa")) {
        const auto& kappa = obj.at("kappa");
        if (kappa.is_string()) {
            if (kappa.get<std::string>() != "schedule") {
                throw config_error("acquisition: kappa must be a positive number or \"schedule\"");
            }
            cfg.kappa = 0.0;
        } else {
            cfg.kappa = kappa.get<double>();
            if (!(cfg.kappa > 0.0)) {
                throw config_error("acquisition: fixed kappa must be > 0");
            }
        }
    }
    cfg.n_candidates = get_or(obj, "n_candidates", cfg.n_candidates);
    cfg.sigma_prop = get_or(obj, "sigma_prop", cfg.sigma_prop);
    return cfg;
}

inline json acquisition_to_json(const AcquisitionConfig& cfg) {
    json obj;
    obj["kind"] = cfg.kind == AcquisitionKind::ei ? "ei" : "ucb";
    if (cfg.kappa > 0.0) {
        obj["kappa"] = cfg.kappa;
    } else {
        obj["kappa"] = "schedule";
    }
    obj["n_candidates"] = cfg.n_candidates;
    obj["sigma_prop"] = cfg.sigma_prop;
    return obj;
}

inline SurrogateConfig surrogate_from_json(const json& obj) {
    check_keys(obj,
               {"kind", "n_trees", "shrinkage", "max_depth", "min_samples_leaf", "train_scope"},
               "surrogate");
    const std::string kind = get_or<std::string>(obj, "kind", "gbrt");
    SurrogateConfig cfg;
    if (kind == "gbrt") {
        cfg = SurrogateConfig::defaults(SurrogateConfig::Kind::gbrt);
    } else if (kind == "qrf") {
        cfg = SurrogateConfig::defaults(SurrogateConfig::Kind::qrf);
    } else {
        throw config_error("surrogate: unknown kind '" + kind + "'");
    }
    cfg.n_trees = get_or(obj, "n_trees", cfg.n_trees);
    cfg.shrinkage = get_or(obj, "shrinkage", cfg.shrinkage);
    cfg.max_depth = get_or(obj, "max_depth", cfg.max_depth);
    cfg.min_samples_leaf = get_or(obj, "min_samples_leaf", cfg.min_samples_leaf);
    const std::string scope = get_or<std::string>(obj, "train_scope", "all_records");
    if (scope == "all_records") {
        cfg.scope = SurrogateConfig::TrainScope::all_records;
    } else if (scope == "epoch_records") {
        cfg.scope = SurrogateConfig::TrainScope::epoch_records;
    } else {
        throw config_error("surrogate: unknown train_scope '" + scope + "'");
    }
    return cfg;
}

inline json surrogate_to_json(const SurrogateConfig& cfg) {
    return json{{"kind", cfg.kind == SurrogateConfig::Kind::gbrt ? "gbrt" : "qrf"},
                {"n_trees", cfg.n_trees},
                {"shrinkage", cfg.shrinkage},
                {"max_depth", cfg.max_depth},
                {"min_samples_leaf", cfg.min_samples_leaf},
                {"train_scope",
                 cfg.scope == SurrogateConfig::TrainScope::all_records ? "all_records"
                                                                       : "epoch_records"}};
}

inline RunConfig run_from_json(const json& obj) {
    check_keys(obj,
               {"mode", "block_size", "reshuffle_each_cycle", "budget_cycles", "n_init", "shots",
                "inner_iters", "max_evals", "noise_sigma", "seed", "parallel_workers",
                "acquisition", "surrogate"},
               "run");
    RunConfig cfg;
    const std::string mode = get_or<std::string>(obj, "mode", "layerwise");
    if (mode == "full") {
        cfg.mode = PartitionMode::full;
    } else if (mode == "random_subspace") {
        cfg.mode = PartitionMode::random_subspace;
    } else if (mode == "layerwise") {
        cfg.mode = PartitionMode::layerwise;
    } else {
        throw config_error("run: unknown mode '" + mode + "'");
    }
    cfg.block_size = get_or(obj, "block_size", cfg.block_size);
    cfg.reshuffle_each_cycle = get_or(obj, "reshuffle_each_cycle", cfg.reshuffle_each_cycle);
    cfg.budget_cycles = get_or(obj, "budget_cycles", cfg.budget_cycles);
    cfg.n_init = get_or(obj, "n_init", cfg.n_init);
    if (obj.contains("shots")) {
        const auto& shots = obj.at("shots");
        if (shots.is_string()) {
            if (shots.get<std::string>() != "exact") {
                throw config_error("run: shots must be a positive integer or \"exact\"");
            }
            cfg.shots = 0;
        } else {
            cfg.shots = shots.get<std::int64_t>();
            if (cfg.shots < 1) {
                throw config_error("run: shots must be >= 1, or \"exact\"");
            }
        }
    }
    cfg.inner_iters = get_or(obj, "inner_iters", cfg.inner_iters);
    cfg.max_evals = get_or(obj, "max_evals", cfg.max_evals);
    cfg.noise_sigma = get_or(obj, "noise_sigma", cfg.noise_sigma);
    cfg.seed = get_or<std::uint64_t>(obj, "seed", cfg.seed);
    cfg.parallel_workers = get_or(obj, "parallel_workers", cfg.parallel_workers);
    if (obj.contains("acquisition")) {
        cfg.acquisition = acquisition_from_json(obj.at("acquisition"));
    }
    if (obj.contains("surrogate")) {
        cfg.surrogate = surrogate_from_json(obj.at("surrogate"));
    }
    return cfg;
}

inline json run_to_json(const RunConfig& cfg) {
    json obj;
    obj["mode"] = to_string(cfg.mode);
    obj["block_size"] = cfg.block_size;
    obj["reshuffle_each_cycle"] = cfg.reshuffle_each_cycle;
    obj["budget_cycles"] = cfg.budget_cycles;
    obj["n_init"] = cfg.n_init;
    if (cfg.shots > 0) {
        obj["shots"] = cfg.shots;
    } else {
        obj["shots"] = "exact";
    }
    obj["inner_iters"] = cfg.inner_iters;
    obj["max_evals"] = cfg.max_evals;
    obj["noise_sigma"] = cfg.noise_sigma;
    obj["seed"] = cfg.seed;
    obj["parallel_workers"] = cfg.parallel_workers;
    obj["acquisition"] = acquisition_to_json(cfg.acquisition);
    obj["surrogate"] = surrogate_to_json(cfg.surrogate);
    return obj;
}

}  // namespace detail

struct DiagnosticsConfig {
    bool enabled = false;
    int probe_count = 20000;

    static DiagnosticsConfig from_json(const json& obj) {
        detail::check_keys(obj, {"enabled", "probe_count"}, "diagnostics");
        DiagnosticsConfig cfg;
        cfg.enabled = detail::get_or(obj, "enabled", cfg.enabled);
        cfg.probe_count = detail::get_or(obj, "probe_count", cfg.probe_count);
        if (cfg.probe_count < 1) {
            throw config_error("diagnostics: probe_count must be >= 1");
        }
        return cfg;
    }

    json to_json() const { return json{{"enabled", enabled}, {"probe_count", probe_count}}; }
};

/// One experiment, fully specified: target, ansatz, run settings,
/// diagnostics options and output location. Everything except target and
/// ansatz has a default; unknown keys anywhere are rejected.
struct ExperimentConfig {
    int schema_version = kConfigSchemaVersion;
    TargetConfig target;
    AnsatzConfig ansatz;
    RunConfig run;
    DiagnosticsConfig diagnostics;
    std::string output_dir;
    std::string suite_id;

    static ExperimentConfig from_json(const json& obj) {
        detail::check_keys(obj,
                           {"schema_version", "target", "ansatz", "run", "diagnostics",
                            "output_dir", "suite_id"},
                           "config");
        const int version = detail::get_or(obj, "schema_version", 0);
        if (version != kConfigSchemaVersion) {
            throw config_error("config: schema_version " + std::to_string(version) +
                               " is not supported (expected " +
                               std::to_string(kConfigSchemaVersion) + ")");
        }
        if (!obj.contains("target") || !obj.contains("ansatz")) {
            throw config_error("config: 'target' and 'ansatz' are required");
        }
        ExperimentConfig cfg;
        cfg.target = TargetConfig::from_json(obj.at("target"));
        cfg.ansatz = AnsatzConfig::from_json(obj.at("ansatz"));
        if (obj.contains("run")) {
            cfg.run = detail::run_from_json(obj.at("run"));
        }
        if (obj.contains("diagnostics")) {
            cfg.diagnostics = DiagnosticsConfig::from_json(obj.at("diagnostics"));
        }
        cfg.output_dir = detail::get_or<std::string>(obj, "output_dir", "");
        cfg.suite_id = detail::get_or<std::string>(obj, "suite_id", "");
        return cfg;
    }

    static ExperimentConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw config_error("cannot open config file '" + path + "'");
        }
        json obj;
        try {
            in >> obj;
        } catch (const json::exception& e) {
            throw config_error("config parse error in '" + path + "': " + e.what());
        }
        return from_json(obj);
    }

    json to_json() const {
        return json{{"schema_version", schema_version},
                    {"target", target.to_json()},
                    {"ansatz", ansatz.to_json()},
                    {"run", detail::run_to_json(run)},
                    {"diagnostics", diagnostics.to_json()},
                    {"output_dir", output_dir},
                    {"suite_id", suite_id}};
    }

    /// The ansatz spec, with the rotation set defaulting to the target
    /// family's natural choice (Ry-only for real-amplitude QSP targets).
    AnsatzSpec build_ansatz_spec() const {
        const RotationSet rotations =
            ansatz.rotations.has_value()
                ? *ansatz.rotations
                : (target.family == TargetFamily::qsp ? RotationSet::ry_only()
                                                      : RotationSet::ry_rz());
        return build_ansatz(ansatz.n_qubits, ansatz.n_layers, rotations);
    }

    void validate() const {
        if (target.n_qubits != ansatz.n_qubits) {
            throw config_error("config: target and ansatz qubit counts differ");
        }
        const AnsatzSpec spec = build_ansatz_spec();
        run.validate(static_cast<std::size_t>(spec.param_count()));
    }
};

}  // namespace treeprep
