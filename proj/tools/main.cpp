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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "treeprep/bench.hpp"
#include "treeprep/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitCapacityError = 3;
constexpr int kExitRuntimeError = 4;

std::string default_out_root() {
    if (const char* env = std::getenv("TREEPREP_OUT_ROOT")) {
        return env;
    }
    return "treeprep-out";
}

struct SynthArgs {
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;
    bool deterministic = false;
};

int cmd_synth(const SynthArgs& args) {
    treeprep::ExperimentConfig config = treeprep::ExperimentConfig::from_file(args.config_path);
    if (args.seed >= 0) {
        config.run.seed = static_cast<std::uint64_t>(args.seed);
    }
    std::string out = !args.out_dir.empty()
                          ? args.out_dir
                          : (!config.output_dir.empty() ? config.output_dir
                                                        : default_out_root() + "/synth");
    const treeprep::SynthOutcome outcome =
        treeprep::run_and_emit(config, out, args.deterministic);
    std::cout << "best_tvd " << outcome.result.y_best << "\n"
              << "best_exact_tvd " << outcome.best_exact_tvd << "\n"
              << "evaluations " << outcome.result.evaluations << "\n"
              << "artifacts " << out << "\n";
    return kExitOk;
}

struct BenchArgs {
    std::string suite;
    std::string out_dir;
    bool deterministic = false;
};

int cmd_bench(const BenchArgs& args) {
    const std::string out = !args.out_dir.empty() ? args.out_dir : default_out_root() + "/bench";
    const auto rows = treeprep::run_bench_and_emit(args.suite, out, args.deterministic);
    std::cout << "suite " << args.suite << ": " << rows.size() << " runs -> " << out << "/"
              << args.suite << "\n";
    return kExitOk;
}

struct TargetGenArgs {
    std::string family;
    int qubits = 3;
    std::uint64_t seed = 0;
    int depth = 12;
    std::string source = "gaussian";
    int layers = 3;
    std::string out_file;
};

int cmd_target_gen(const TargetGenArgs& args) {
    treeprep::TargetConfig cfg;
    cfg.n_qubits = args.qubits;
    cfg.seed = args.seed;
    if (args.family == "rqc") {
        cfg.family = treeprep::TargetFamily::rqc;
        cfg.depth = args.depth;
    } else if (args.family == "qsp") {
        cfg.family = treeprep::TargetFamily::qsp;
        if (args.source == "gaussian") {
            cfg.source = treeprep::QspSource::gaussian;
        } else if (args.source == "uniform") {
            cfg.source = treeprep::QspSource::uniform;
        } else {
            throw treeprep::config_error("unknown qsp source '" + args.source + "'");
        }
    } else if (args.family == "vqe") {
        cfg.family = treeprep::TargetFamily::vqe;
        cfg.n_layers = args.layers;
    } else {
        throw treeprep::config_error("unknown target family '" + args.family + "'");
    }

    // Build once to surface capacity/parameter errors before writing.
    const treeprep::TargetSpec target = cfg.build();
    (void)target;

    const std::string out =
        !args.out_file.empty() ? args.out_file : default_out_root() + "/target.json";
    const auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    treeprep::detail::write_text_file(out, cfg.to_json().dump(2) + "\n");
    std::cout << "target " << args.family << " (" << args.qubits << " qubits, seed "
              << args.seed << ") -> " << out << "\n";
    return kExitOk;
}

struct DiagArgs {
    std::string run_dir;
    int probes = 0;
};

int cmd_diag(const DiagArgs& args) {
    namespace fs = std::filesystem;
    const fs::path root(args.run_dir);
    const treeprep::ExperimentConfig config =
        treeprep::ExperimentConfig::from_file((root / "config.json").string());
    const treeprep::EvaluationDataset data =
        treeprep::dataset_from_events((root / "events.jsonl").string());
    if (data.empty()) {
        throw treeprep::config_error("run directory has an empty event log");
    }

    const treeprep::TargetSpec target = config.target.build();
    const treeprep::AnsatzSpec spec = config.build_ansatz_spec();
    auto exact_loss = [&](const treeprep::ParameterVector& theta) {
        return treeprep::evaluate_loss(target, spec, theta, 0, 0);
    };

    treeprep::DiagnosticsOptions options;
    options.probe_count = args.probes > 0 ? args.probes : config.diagnostics.probe_count;
    if (config.target.family == treeprep::TargetFamily::vqe) {
        options.f_star = 0.0;
    }
    const treeprep::DiagnosticsReport report = treeprep::build_report(
        data, config.run.surrogate.shrinkage, config.run.surrogate.n_trees, options, exact_loss);

    treeprep::detail::write_text_file(root / "diagnostics.csv",
                                      treeprep::diagnostics_csv(report));
    std::cout << "records " << data.size() << "\n"
              << "final_covering_radius " << report.covering_radius.back() << "\n"
              << "final_packing_bound " << report.packing_bound.back() << "\n"
              << "lipschitz_lower_bound " << report.lipschitz_lower << "\n"
              << "sigma_hat " << report.sigma_hat << "\n";
    if (!std::isnan(report.fitted_exponent)) {
        std::cout << "fitted_rate_exponent " << report.fitted_exponent << "\n";
    }
    std::cout << "diagnostics " << (root / "diagnostics.csv").string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surrogate-guided approximate quantum state preparation"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Run one state-preparation experiment");
    synth->add_option("--config", synth_args.config_path, "Experiment config (JSON)")
        ->required();
    synth->add_option("--out", synth_args.out_dir, "Output directory");
    synth->add_option("--seed", synth_args.seed, "Override the master seed");
    synth->add_flag("--deterministic", synth_args.deterministic,
                    "Zero wall-clock fields so reruns are byte-identical");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Run a benchmark suite");
    bench->add_option("--suite", bench_args.suite, "Suite id: q1, q2 or q3")->required();
    bench->add_option("--out", bench_args.out_dir, "Output directory");
    bench->add_flag("--deterministic", bench_args.deterministic,
                    "Zero wall-clock fields so reruns are byte-identical");

    TargetGenArgs target_args;
    CLI::App* target = app.add_subcommand("target", "Target-state utilities");
    CLI::App* gen = target->add_subcommand("gen", "Generate a target spec file");
    gen->add_option("--family", target_args.family, "rqc, qsp or vqe")->required();
    gen->add_option("--qubits", target_args.qubits, "Number of qubits")->required();
    gen->add_option("--seed", target_args.seed, "Generation seed");
    gen->add_option("--depth", target_args.depth, "RQC gate count");
    gen->add_option("--source", target_args.source, "QSP source: gaussian or uniform");
    gen->add_option("--layers", target_args.layers, "VQE generating layer count");
    gen->add_option("--out", target_args.out_file, "Output file");
    target->require_subcommand(1);

    DiagArgs diag_args;
    CLI::App* diag = app.add_subcommand("diag", "Convergence diagnostics for a finished run");
    diag->add_option("--run", diag_args.run_dir, "Run output directory")->required();
    diag->add_option("--probes", diag_args.probes, "Covering-radius probe count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_args);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_args);
        }
        if (target->parsed()) {
            return cmd_target_gen(target_args);
        }
        if (diag->parsed()) {
            return cmd_diag(diag_args);
        }
    } catch (const treeprep::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacityError;
    } catch (const treeprep::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitConfigError;
}
