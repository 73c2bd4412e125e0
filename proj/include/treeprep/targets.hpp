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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeprep/ansatz.hpp"
#include "treeprep/distribution.hpp"
#include "treeprep/rng.hpp"
#include "treeprep/statevector.hpp"

namespace treeprep {

enum class TargetFamily { rqc, qsp, vqe };

enum class QspSource { gaussian, uniform };

inline std::string to_string(TargetFamily f) {
    switch (f) {
        case TargetFamily::rqc: return "rqc";
        case TargetFamily::qsp: return "qsp";
        case TargetFamily::vqe: return "vqe";
    }
    return "?";
}

inline std::string to_string(QspSource s) {
    return s == QspSource::gaussian ? "gaussian" : "uniform";
}

/// A reference state to prepare: the family, the generation parameters, and
/// the exact output distribution. Regenerating from (family, parameters,
/// seed) is bit-identical, so serialized target specs only need to carry
/// those fields.
struct TargetSpec {
    TargetFamily family = TargetFamily::rqc;
    int n_qubits = 1;
    std::uint64_t seed = 0;

    int rqc_depth = 0;                       // rqc only: number of sampled gates
    QspSource qsp_source = QspSource::gaussian;  // qsp only
    int vqe_layers = 0;                      // vqe only: layers of the generating ansatz

    /// True for QSP targets: real amplitudes constrain the search ansatz to
    /// Ry rotations only.
    bool real_amplitude_mode = false;

    ProbabilityDistribution exact_distribution =
        ProbabilityDistribution::exact({1.0});

    /// Generating gate list (rqc and vqe families), kept for re-simulation.
    std::vector<GateOp> circuit;

    /// The hidden generating parameters of a VQE target. Sealed fixture
    /// knowledge: the optimizer never sees it; oracle tests use it as the
    /// known global optimum (loss exactly 0 there).
    std::optional<ParameterVector> hidden_theta;
};

/// Random quantum circuit target: `depth` gates sampled one at a time, each
/// drawn uniformly from {Ry, Rz, CX} (rotations only when n_qubits == 1),
/// with uniform angle in [0, 2*pi) for rotations and a uniform cascade
/// position for CX (control q, target q+1).
inline TargetSpec make_rqc(int n_qubits, int depth, std::uint64_t seed,
                           int max_qubits = kDefaultMaxQubits) {
    if (n_qubits < 1) {
        throw std::invalid_argument("make_rqc: n_qubits must be >= 1");
    }
    if (depth < 1) {
        throw std::invalid_argument("make_rqc: depth must be >= 1");
    }
    if (n_qubits > max_qubits) {
        throw capacity_error("make_rqc: " + std::to_string(n_qubits) +
                             " qubits exceeds the dense-simulation cap");
    }
    Rng rng(derive_seed({seed, 0x7160C5ULL}));
    std::vector<GateOp> gates;
    gates.reserve(static_cast<std::size_t>(depth));
    const int kinds = n_qubits >= 2 ? 3 : 2;
    for (int i = 0; i < depth; ++i) {
        const std::uint64_t kind = rng.below(static_cast<std::uint64_t>(kinds));
        if (kind == 2) {
            const int pos = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_qubits - 1)));
            gates.push_back(GateOp::make_cx(pos, pos + 1));
        } else {
            const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_qubits)));
            const double angle = rng.uniform(0.0, kTwoPi);
            gates.push_back(kind == 0 ? GateOp::make_ry(q, angle) : GateOp::make_rz(q, angle));
        }
    }

    TargetSpec target;
    target.family = TargetFamily::rqc;
    target.n_qubits = n_qubits;
    target.seed = seed;
    target.rqc_depth = depth;
    target.circuit = gates;
    target.exact_distribution = output_distribution(simulate_gates(n_qubits, gates));
    return target;
}

/// l2-normalizes a real amplitude vector and squares it into a measurement
/// distribution. Rejects the all-zero vector.
inline ProbabilityDistribution normalized_amplitude_distribution(std::vector<double> amps) {
    double norm_sq = 0.0;
    for (double a : amps) {
        norm_sq += a * a;
    }
    if (!(norm_sq > 0.0)) {
        throw std::invalid_argument("amplitude vector must be nonzero");
    }
    std::vector<double> probs(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        probs[i] = amps[i] * amps[i] / norm_sq;
    }
    return ProbabilityDistribution::exact(std::move(probs));
}

/// Amplitude-encoding target: draw 2^n reals from the source (standard
/// normal, or Uniform[0,1)), l2-normalize, and square. An all-zero draw is
/// retried with an incremented seed.
inline TargetSpec make_qsp(int n_qubits, QspSource source, std::uint64_t seed,
                           int max_qubits = kDefaultMaxQubits) {
    if (n_qubits < 1) {
        throw std::invalid_argument("make_qsp: n_qubits must be >= 1");
    }
    if (n_qubits > max_qubits) {
        throw capacity_error("make_qsp: " + std::to_string(n_qubits) +
                             " qubits exceeds the dense-simulation cap");
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<double> amps(dim);
    std::uint64_t draw_seed = seed;
    for (;;) {
        Rng rng(derive_seed({draw_seed, 0x95FAULL}));
        double norm_sq = 0.0;
        for (double& a : amps) {
            a = source == QspSource::gaussian ? rng.normal() : rng.uniform();
            norm_sq += a * a;
        }
        if (norm_sq > 0.0) {
            break;
        }
        ++draw_seed;
    }

    TargetSpec target;
    target.family = TargetFamily::qsp;
    target.n_qubits = n_qubits;
    target.seed = seed;
    target.qsp_source = source;
    target.real_amplitude_mode = true;
    target.exact_distribution = normalized_amplitude_distribution(std::move(amps));
    return target;
}

/// Hidden-parameter instance of the standard {Ry, Rz} + cascade ansatz:
/// the generating angles are sampled uniformly and sealed, and the exact
/// distribution of that instance becomes the reference. The loss landscape
/// of the matching search ansatz has a global minimum of exactly 0 at the
/// hidden point.
inline TargetSpec make_vqe(int n_qubits, int n_layers, std::uint64_t seed,
                           int max_qubits = kDefaultMaxQubits) {
    const AnsatzSpec spec = build_ansatz(n_qubits, n_layers, RotationSet::ry_rz(), max_qubits);
    Rng rng(derive_seed({seed, 0x5BE1ULL}));
    const ParameterVector hidden =
        ParameterVector::random(static_cast<std::size_t>(spec.param_count()), rng);

    TargetSpec target;
    target.family = TargetFamily::vqe;
    target.n_qubits = n_qubits;
    target.seed = seed;
    target.vqe_layers = n_layers;
    target.circuit = gate_sequence(spec, hidden);
    target.hidden_theta = hidden;
    target.exact_distribution = output_distribution(simulate(spec, hidden));
    return target;
}

struct ReferenceMode {
    bool exact = true;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;

    static ReferenceMode make_exact() { return {}; }
    static ReferenceMode make_shots(std::int64_t k, std::uint64_t seed) {
        return {false, k, seed};
    }
};

/// The reference statistics the optimizer compares against: the stored
/// exact distribution, or a shot-sampled estimate of it.
inline ProbabilityDistribution reference(const TargetSpec& target, const ReferenceMode& mode) {
    if (mode.exact) {
        return target.exact_distribution;
    }
    if (mode.shots < 1) {
        throw std::invalid_argument("reference: shot count must be >= 1");
    }
    return sample_shots(target.exact_distribution, mode.shots, mode.seed);
}

/// The rotation set a search ansatz should use for this target family
/// (QSP's real amplitudes restrict the search to Ry).
inline RotationSet search_rotations(const TargetSpec& target) {
    return target.real_amplitude_mode ? RotationSet::ry_only() : RotationSet::ry_rz();
}

}  // namespace treeprep
