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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "treeprep/config.hpp"
#include "treeprep/diagnostics.hpp"
#include "treeprep/optimizer.hpp"
#include "treeprep/qasm.hpp"

namespace treeprep {

/// Result of one synth run plus everything the file artifacts need.
struct SynthOutcome {
    RunResult result;
    double best_exact_tvd = 0.0;  // noiseless TVD of theta_best
    CircuitMetrics metrics;
    AnsatzSpec spec;
    TargetSpec target;
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << content;
}

}  // namespace detail

inline SynthOutcome run_synth(const ExperimentConfig& config) {
    config.validate();
    SynthOutcome outcome;
    outcome.target = config.target.build();
    outcome.spec = config.build_ansatz_spec();
    outcome.result = run_surrogate_prep(outcome.target, outcome.spec, config.run);
    outcome.best_exact_tvd =
        evaluate_loss(outcome.target, outcome.spec, outcome.result.theta_best, 0, 0);
    outcome.metrics = circuit_metrics(outcome.spec);
    return outcome;
}

/// The best-so-far curve as comma-separated rows. Deterministic mode
/// zeroes the wall-clock column so reruns are byte-identical.
inline std::string curve_csv(const RunResult& result, bool deterministic) {
    std::string text = "iteration,best_tvd,evals,shots_cum,wall_ms\n";
    for (const CurvePoint& pt : result.curve) {
        text += std::to_string(pt.iteration);
        text += ',';
        text += detail::fmt_double(pt.best_tvd);
        text += ',';
        text += std::to_string(pt.evals);
        text += ',';
        text += std::to_string(pt.shots_cum);
        text += ',';
        text += std::to_string(deterministic ? 0 : pt.wall_ms);
        text += '\n';
    }
    return text;
}

/// Line-delimited event log (one JSON object per line).
inline std::string events_jsonl(const RunResult& result, bool deterministic) {
    std::string text;
    for (const RunEvent& ev : result.events) {
        json obj;
        if (ev.type == RunEvent::Type::evaluation) {
            obj["type"] = "evaluation";
            obj["index"] = ev.eval_index;
            obj["cycle"] = ev.cycle;
            obj["block"] = ev.block;
            obj["tag"] = ev.tag;
            obj["theta"] = ev.theta.values();
            obj["y"] = ev.y;
            obj["best"] = ev.best_after;
            obj["wall_ms"] = deterministic ? 0 : ev.wall_ms;
        } else {
            obj["type"] = "sync";
            obj["cycle"] = ev.cycle;
            obj["improved_blocks"] = ev.improved_blocks;
            obj["composed"] = ev.composed;
            obj["best"] = ev.best_after;
        }
        text += obj.dump();
        text += '\n';
    }
    return text;
}

inline std::string summary_text(const SynthOutcome& outcome, const ExperimentConfig& config,
                                bool deterministic) {
    const RunResult& r = outcome.result;
    std::string text;
    auto kv = [&](const std::string& key, const std::string& value) {
        text += key + " = " + value + "\n";
    };
    kv("suite_id", config.suite_id.empty() ? "-" : config.suite_id);
    kv("target_family", to_string(config.target.family));
    kv("n_qubits", std::to_string(config.target.n_qubits));
    kv("mode", to_string(config.run.mode));
    kv("surrogate",
       config.run.surrogate.kind == SurrogateConfig::Kind::gbrt ? "gbrt" : "qrf");
    kv("seed", std::to_string(config.run.seed));
    kv("best_tvd", detail::fmt_double(r.y_best));
    kv("best_exact_tvd", detail::fmt_double(outcome.best_exact_tvd));
    kv("evaluations", std::to_string(r.evaluations));
    kv("shots_total", std::to_string(r.shots_total));
    kv("wall_ms", deterministic ? "0" : std::to_string(static_cast<long long>(r.wall_ms_total)));
    kv("depth", std::to_string(outcome.metrics.depth));
    kv("cx_count", std::to_string(outcome.metrics.cx_count));
    return text;
}

inline std::string diagnostics_csv(const DiagnosticsReport& report) {
    std::string text = "t,covering_radius,packing_bound,eta,regret_best\n";
    for (std::size_t t = 0; t < report.covering_radius.size(); ++t) {
        text += std::to_string(t + 1);
        text += ',';
        text += detail::fmt_double(report.covering_radius[t]);
        text += ',';
        text += detail::fmt_double(report.packing_bound[t]);
        text += ',';
        text += detail::fmt_double(report.eta[t]);
        text += ',';
        text += t < report.regret_best_so_far.size()
                    ? detail::fmt_double(report.regret_best_so_far[t])
                    : std::string("nan");
        text += '\n';
    }
    return text;
}

/// Runs a synth experiment and writes the artifacts into out_dir:
/// config.json (the resolved configuration), summary.txt, curve.csv,
/// events.jsonl, best.qasm, and diagnostics.csv when enabled. With
/// deterministic = true all wall-clock fields are written as 0, making
/// every artifact a pure function of (config, seed).
inline SynthOutcome run_and_emit(const ExperimentConfig& config, const std::string& out_dir,
                                 bool deterministic) {
    config.validate();  // fail before creating any output
    const SynthOutcome outcome = run_synth(config);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path root(out_dir);

    ExperimentConfig resolved = config;
    resolved.output_dir = out_dir;
    detail::write_text_file(root / "config.json", resolved.to_json().dump(2) + "\n");
    detail::write_text_file(root / "summary.txt", summary_text(outcome, config, deterministic));
    detail::write_text_file(root / "curve.csv", curve_csv(outcome.result, deterministic));
    detail::write_text_file(root / "events.jsonl", events_jsonl(outcome.result, deterministic));
    detail::write_text_file(root / "best.qasm",
                            emit_qasm(outcome.spec, outcome.result.theta_best));

    if (config.diagnostics.enabled) {
        DiagnosticsOptions options;
        options.probe_count = config.diagnostics.probe_count;
        if (config.target.family == TargetFamily::vqe) {
            options.f_star = 0.0;  // hidden-parameter targets are realizable
        }
        const TargetSpec& target = outcome.target;
        const AnsatzSpec& spec = outcome.spec;
        auto exact_loss = [&target, &spec](const ParameterVector& theta) {
            return evaluate_loss(target, spec, theta, 0, 0);
        };
        const DiagnosticsReport report =
            build_report(outcome.result.dataset, config.run.surrogate.shrinkage,
                         config.run.surrogate.n_trees, options, exact_loss);
        detail::write_text_file(root / "diagnostics.csv", diagnostics_csv(report));
    }
    return outcome;
}

/// Rebuilds the evaluation dataset of a finished run from its event log.
inline EvaluationDataset dataset_from_events(const std::string& events_path) {
    std::ifstream in(events_path);
    if (!in) {
        throw std::runtime_error("cannot open event log '" + events_path + "'");
    }
    EvaluationDataset data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const json obj = json::parse(line);
        if (obj.at("type").get<std::string>() != "evaluation") {
            continue;
        }
        data.append(ParameterVector(obj.at("theta").get<std::vector<double>>()),
                    obj.at("y").get<double>(), obj.at("tag").get<std::string>());
    }
    return data;
}

}  // namespace treeprep
