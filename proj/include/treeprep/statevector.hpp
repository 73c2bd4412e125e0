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
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "treeprep/ansatz.hpp"
#include "treeprep/distribution.hpp"

namespace treeprep {

/// Dense n-qubit statevector with the big-endian amplitude layout: the
/// amplitude index is the bitstring q0 q1 ... q_{n-1}, so qubit 0 is the
/// most significant bit. The QASM emitter uses the same convention.
///
/// Gate matrices (columns act on |0>, |1> of the touched qubit):
///
///     Ry(t) = [[cos(t/2), -sin(t/2)],
///              [sin(t/2),  cos(t/2)]]
///     Rz(l) = [[exp(-i l/2), 0],
///              [0,           exp(+i l/2)]]
///     CX    = |0><0| (x) I + |1><1| (x) X   (first index = control)
class StateVector {
  public:
    using complex_t = std::complex<double>;

    /// Initializes |0...0>.
    explicit StateVector(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1) {
            throw std::invalid_argument("StateVector needs at least one qubit");
        }
        amps_.assign(std::size_t{1} << n_qubits, complex_t{0.0, 0.0});
        amps_[0] = complex_t{1.0, 0.0};
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<complex_t>& amplitudes() const { return amps_; }
    std::size_t dimension() const { return amps_.size(); }

    void apply_ry(int qubit, double theta) {
        const double c = std::cos(theta / 2.0);
        const double s = std::sin(theta / 2.0);
        for_each_pair(qubit, [&](complex_t& a0, complex_t& a1) {
            const complex_t new0 = c * a0 - s * a1;
            const complex_t new1 = s * a0 + c * a1;
            a0 = new0;
            a1 = new1;
        });
    }

    void apply_rz(int qubit, double lambda) {
        const complex_t phase0 = std::polar(1.0, -lambda / 2.0);
        const complex_t phase1 = std::polar(1.0, lambda / 2.0);
        for_each_pair(qubit, [&](complex_t& a0, complex_t& a1) {
            a0 *= phase0;
            a1 *= phase1;
        });
    }

    void apply_cx(int control, int target) {
        check_qubit(control);
        check_qubit(target);
        if (control == target) {
            throw std::invalid_argument("apply_cx: control equals target");
        }
        const std::size_t cbit = std::size_t{1} << (n_qubits_ - 1 - control);
        const std::size_t tbit = std::size_t{1} << (n_qubits_ - 1 - target);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cbit) != 0 && (i & tbit) == 0) {
                std::swap(amps_[i], amps_[i | tbit]);
            }
        }
    }

    void apply(const GateOp& g) {
        switch (g.kind) {
            case GateOp::Kind::ry:
                apply_ry(g.qubit, g.angle);
                break;
            case GateOp::Kind::rz:
                apply_rz(g.qubit, g.angle);
                break;
            case GateOp::Kind::cx:
                apply_cx(g.qubit, g.qubit2);
                break;
        }
    }

    double norm() const {
        double acc = 0.0;
        for (const complex_t& a : amps_) {
            acc += std::norm(a);
        }
        return std::sqrt(acc);
    }

  private:
    void check_qubit(int q) const {
        if (q < 0 || q >= n_qubits_) {
            throw std::invalid_argument("qubit index out of range");
        }
    }

    template <class Fn>
    void for_each_pair(int qubit, Fn&& fn) {
        check_qubit(qubit);
        const std::size_t bit = std::size_t{1} << (n_qubits_ - 1 - qubit);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & bit) == 0) {
                fn(amps_[i], amps_[i | bit]);
            }
        }
    }

    int n_qubits_;
    std::vector<complex_t> amps_;
};

/// Applies a flat gate list to |0...0>.
inline StateVector simulate_gates(int n_qubits, const std::vector<GateOp>& gates) {
    StateVector state(n_qubits);
    for (const GateOp& g : gates) {
        state.apply(g);
    }
    return state;
}

/// Simulates the ansatz instantiated at theta.
inline StateVector simulate(const AnsatzSpec& spec, const ParameterVector& theta) {
    return simulate_gates(spec.n_qubits, gate_sequence(spec, theta));
}

/// Computational-basis measurement distribution p(x) = |amplitude_x|^2.
/// The probabilities are renormalized by their sum so the result satisfies
/// the exact-distribution invariant even when the state norm is only within
/// 1e-10 of one.
inline ProbabilityDistribution output_distribution(const StateVector& state) {
    if (std::abs(state.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("output_distribution: state is not unit norm");
    }
    std::vector<double> probs(state.dimension());
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::norm(state.amplitudes()[i]);
        total += probs[i];
    }
    for (double& p : probs) {
        p /= total;
    }
    return ProbabilityDistribution::exact(std::move(probs));
}

}  // namespace treeprep
