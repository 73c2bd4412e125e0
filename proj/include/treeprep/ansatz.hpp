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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeprep/common.hpp"
#include "treeprep/rng.hpp"

namespace treeprep {

/// Dense statevector simulation keeps the whole 2^n amplitude vector in
/// memory; this cap keeps desk-scale runs in the millisecond range.
inline constexpr int kDefaultMaxQubits = 12;

/// Which single-qubit rotations appear in each layer. When both are present
/// the per-qubit order is fixed: Ry first, then Rz.
struct RotationSet {
    bool ry = true;
    bool rz = true;

    int count() const { return (ry ? 1 : 0) + (rz ? 1 : 0); }
    bool empty() const { return !ry && !rz; }

    static RotationSet ry_only() { return {true, false}; }
    static RotationSet ry_rz() { return {true, true}; }
};

/// One primitive gate in simulation order.
struct GateOp {
    enum class Kind { ry, rz, cx };

    Kind kind;
    int qubit;       // rotation target, or CX control
    int qubit2 = -1; // CX target, unused for rotations
    double angle = 0.0;

    static GateOp make_ry(int q, double a) { return {Kind::ry, q, -1, a}; }
    static GateOp make_rz(int q, double a) { return {Kind::rz, q, -1, a}; }
    static GateOp make_cx(int c, int t) { return {Kind::cx, c, t, 0.0}; }
};

/// Layered circuit template: every layer applies the rotation set to each
/// qubit (Ry before Rz), then a linear CX cascade CX(q, q+1) for
/// q = 0 .. n-2. The map from parameter index to gate slot is the fixed
/// bijection
///
///     index = (layer * n_qubits + qubit) * |rotations| + rotation_slot
///
/// i.e. layers outermost, then qubits, then rotation kind (Ry = slot 0,
/// Rz = slot 1 when both are present). Layer l therefore owns the
/// contiguous index range [l * n_qubits * |rotations|, (l+1) * ...).
struct AnsatzSpec {
    int n_qubits = 1;
    int n_layers = 1;
    RotationSet rotations;

    int param_count() const { return n_qubits * rotations.count() * n_layers; }

    int param_index(int layer, int qubit, int rotation_slot) const {
        return (layer * n_qubits + qubit) * rotations.count() + rotation_slot;
    }
};

inline AnsatzSpec build_ansatz(int n_qubits, int n_layers, RotationSet rotations,
                               int max_qubits = kDefaultMaxQubits) {
    if (rotations.empty()) {
        throw std::invalid_argument("build_ansatz: rotation set must be non-empty");
    }
    if (n_qubits < 1 || n_layers < 1) {
        throw std::invalid_argument("build_ansatz: need n_qubits >= 1 and n_layers >= 1");
    }
    if (n_qubits > max_qubits) {
        throw capacity_error("build_ansatz: " + std::to_string(n_qubits) +
                             " qubits exceeds the dense-simulation cap of " +
                             std::to_string(max_qubits));
    }
    return AnsatzSpec{n_qubits, n_layers, rotations};
}

/// A point in Theta = [0, 2*pi)^d. Every component is wrapped mod 2*pi on
/// construction.
class ParameterVector {
  public:
    ParameterVector() = default;

    explicit ParameterVector(std::vector<double> values) : values_(std::move(values)) {
        for (double& v : values_) {
            v = wrap_angle(v);
        }
    }

    static ParameterVector zeros(std::size_t d) {
        return ParameterVector(std::vector<double>(d, 0.0));
    }

    static ParameterVector random(std::size_t d, Rng& rng) {
        std::vector<double> v(d);
        for (double& x : v) {
            x = rng.uniform(0.0, kTwoPi);
        }
        return ParameterVector(std::move(v));
    }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

    void set(std::size_t i, double v) { values_[i] = wrap_angle(v); }

    bool operator==(const ParameterVector& other) const = default;

  private:
    std::vector<double> values_;
};

/// Plain l2 distance on the box coordinates (no angular wraparound; the
/// domain is treated as the flat box [0, 2*pi)^d).
inline double l2_distance(const ParameterVector& a, const ParameterVector& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

namespace detail {

/// Enumerates the gate slots of a spec in simulation order, invoking
/// on_rotation(layer, qubit, rotation_slot, kind) and on_cx(control, target).
template <class RotFn, class CxFn>
void for_each_gate_slot(const AnsatzSpec& spec, RotFn&& on_rotation, CxFn&& on_cx) {
    for (int layer = 0; layer < spec.n_layers; ++layer) {
        for (int q = 0; q < spec.n_qubits; ++q) {
            int slot = 0;
            if (spec.rotations.ry) {
                on_rotation(layer, q, slot++, GateOp::Kind::ry);
            }
            if (spec.rotations.rz) {
                on_rotation(layer, q, slot++, GateOp::Kind::rz);
            }
        }
        for (int q = 0; q + 1 < spec.n_qubits; ++q) {
            on_cx(q, q + 1);
        }
    }
}

}  // namespace detail

/// Instantiates the ansatz at a parameter point as a flat gate list in
/// simulation order.
inline std::vector<GateOp> gate_sequence(const AnsatzSpec& spec, const ParameterVector& theta) {
    if (static_cast<int>(theta.size()) != spec.param_count()) {
        throw std::invalid_argument("gate_sequence: parameter vector has dimension " +
                                    std::to_string(theta.size()) + ", ansatz needs " +
                                    std::to_string(spec.param_count()));
    }
    std::vector<GateOp> gates;
    gates.reserve(static_cast<std::size_t>(spec.param_count()) +
                  static_cast<std::size_t>(spec.n_layers) * (spec.n_qubits - 1));
    detail::for_each_gate_slot(
        spec,
        [&](int layer, int q, int slot, GateOp::Kind kind) {
            const double angle = theta[static_cast<std::size_t>(spec.param_index(layer, q, slot))];
            gates.push_back(kind == GateOp::Kind::ry ? GateOp::make_ry(q, angle)
                                                     : GateOp::make_rz(q, angle));
        },
        [&](int c, int t) { gates.push_back(GateOp::make_cx(c, t)); });
    return gates;
}

/// The per-layer parameter blocks of the bijection above, in layer order.
inline std::vector<std::vector<std::size_t>> layer_blocks(const AnsatzSpec& spec) {
    const std::size_t per_layer =
        static_cast<std::size_t>(spec.n_qubits) * static_cast<std::size_t>(spec.rotations.count());
    std::vector<std::vector<std::size_t>> blocks(static_cast<std::size_t>(spec.n_layers));
    for (int layer = 0; layer < spec.n_layers; ++layer) {
        auto& block = blocks[static_cast<std::size_t>(layer)];
        block.resize(per_layer);
        for (std::size_t k = 0; k < per_layer; ++k) {
            block[k] = static_cast<std::size_t>(layer) * per_layer + k;
        }
    }
    return blocks;
}

struct CircuitMetrics {
    int depth = 0;
    int cx_count = 0;
};

/// Depth is the critical path of the gate DAG with every rotation and every
/// CX costing one time step; the linear cascade serializes because each CX
/// shares a qubit with the next. cx_count = (n_qubits - 1) * n_layers.
inline CircuitMetrics circuit_metrics(const AnsatzSpec& spec) {
    std::vector<int> clock(static_cast<std::size_t>(spec.n_qubits), 0);
    int cx_count = 0;
    detail::for_each_gate_slot(
        spec,
        [&](int, int q, int, GateOp::Kind) { ++clock[static_cast<std::size_t>(q)]; },
        [&](int c, int t) {
            const int start = std::max(clock[static_cast<std::size_t>(c)],
                                       clock[static_cast<std::size_t>(t)]);
            clock[static_cast<std::size_t>(c)] = start + 1;
            clock[static_cast<std::size_t>(t)] = start + 1;
            ++cx_count;
        });
    const int depth = *std::max_element(clock.begin(), clock.end());
    return CircuitMetrics{depth, cx_count};
}

/// Depth/CX metrics of an arbitrary gate list (same counting rules).
inline CircuitMetrics circuit_metrics(int n_qubits, const std::vector<GateOp>& gates) {
    std::vector<int> clock(static_cast<std::size_t>(n_qubits), 0);
    int cx_count = 0;
    for (const GateOp& g : gates) {
        if (g.kind == GateOp::Kind::cx) {
            const int start = std::max(clock[static_cast<std::size_t>(g.qubit)],
                                       clock[static_cast<std::size_t>(g.qubit2)]);
            clock[static_cast<std::size_t>(g.qubit)] = start + 1;
            clock[static_cast<std::size_t>(g.qubit2)] = start + 1;
            ++cx_count;
        } else {
            ++clock[static_cast<std::size_t>(g.qubit)];
        }
    }
    const int depth = clock.empty() ? 0 : *std::max_element(clock.begin(), clock.end());
    return CircuitMetrics{depth, cx_count};
}

}  // namespace treeprep
