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

#include <cctype>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeprep/ansatz.hpp"

namespace treeprep {

/// Parse failure inside the OpenQASM 2.0 subset, carrying the 1-based
/// source position.
struct qasm_error : std::runtime_error {
    int line;
    int column;

    qasm_error(int line_, int column_, const std::string& msg)
        : std::runtime_error("qasm:" + std::to_string(line_) + ":" + std::to_string(column_) +
                             ": " + msg),
          line(line_),
          column(column_) {}
};

namespace detail {

inline std::string format_angle(double angle) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", angle);
    return buf;
}

}  // namespace detail

/// Emits the OpenQASM 2.0 subset used by this project: one qreg/creg pair,
/// ry / rz / cx gates in simulation order (angles printed with 12
/// significant digits), and per-qubit measurements at the end.
inline std::string emit_qasm(int n_qubits, const std::vector<GateOp>& gates) {
    std::string text;
    text += "OPENQASM 2.0;\n";
    text += "include \"qelib1.inc\";\n";
    text += "qreg q[" + std::to_string(n_qubits) + "];\n";
    text += "creg c[" + std::to_string(n_qubits) + "];\n";
    for (const GateOp& g : gates) {
        switch (g.kind) {
            case GateOp::Kind::ry:
                text += "ry(" + detail::format_angle(g.angle) + ") q[" +
                        std::to_string(g.qubit) + "];\n";
                break;
            case GateOp::Kind::rz:
                text += "rz(" + detail::format_angle(g.angle) + ") q[" +
                        std::to_string(g.qubit) + "];\n";
                break;
            case GateOp::Kind::cx:
                text += "cx q[" + std::to_string(g.qubit) + "],q[" +
                        std::to_string(g.qubit2) + "];\n";
                break;
        }
    }
    for (int q = 0; q < n_qubits; ++q) {
        text += "measure q[" + std::to_string(q) + "] -> c[" + std::to_string(q) + "];\n";
    }
    return text;
}

inline std::string emit_qasm(const AnsatzSpec& spec, const ParameterVector& theta) {
    return emit_qasm(spec.n_qubits, gate_sequence(spec, theta));
}

/// Parsed circuit: the gate list in file order plus the rotation angles in
/// gate order (the theta the file encodes).
struct ParsedQasm {
    int n_qubits = 0;
    std::vector<GateOp> gates;
    std::vector<double> angles;
};

namespace detail {

class QasmScanner {
  public:
    explicit QasmScanner(const std::string& text) : text_(text) {}

    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }

    int line() const { return line_; }
    int column() const { return col_; }

    /// Next identifier / keyword ([A-Za-z_][A-Za-z0-9_.]*).
    std::string identifier() {
        skip_space();
        mark();
        if (pos_ >= text_.size() || !(std::isalpha(peek()) || peek() == '_')) {
            fail("expected an identifier");
        }
        std::string word;
        while (pos_ < text_.size() && (std::isalnum(peek()) || peek() == '_' || peek() == '.')) {
            word.push_back(advance());
        }
        return word;
    }

    void expect(char c) {
        skip_space();
        mark();
        if (pos_ >= text_.size() || peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        advance();
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    void expect_arrow() {
        skip_space();
        mark();
        if (pos_ + 1 >= text_.size() || peek() != '-' || text_[pos_ + 1] != '>') {
            fail("expected '->'");
        }
        advance();
        advance();
    }

    int integer() {
        skip_space();
        mark();
        if (pos_ >= text_.size() || !std::isdigit(peek())) {
            fail("expected an integer");
        }
        long value = 0;
        while (pos_ < text_.size() && std::isdigit(peek())) {
            value = value * 10 + (advance() - '0');
            if (value > 1000000) {
                fail("integer literal too large");
            }
        }
        return static_cast<int>(value);
    }

    std::string quoted_string() {
        expect('"');
        std::string s;
        while (pos_ < text_.size() && peek() != '"') {
            s.push_back(advance());
        }
        expect('"');
        return s;
    }

    /// Constant expression subset: numeric literals and `pi` combined with
    /// '*' and '/', with optional leading '-'.
    double const_expr() {
        double value = factor();
        for (;;) {
            skip_space();
            if (pos_ < text_.size() && peek() == '*') {
                advance();
                value *= factor();
            } else if (pos_ < text_.size() && peek() == '/') {
                advance();
                value /= factor();
            } else {
                return value;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw qasm_error(mark_line_, mark_col_, msg);
    }

    void mark() {
        mark_line_ = line_;
        mark_col_ = col_;
    }

  private:
    double factor() {
        skip_space();
        mark();
        if (pos_ < text_.size() && peek() == '-') {
            advance();
            return -factor();
        }
        if (pos_ < text_.size() && (std::isalpha(peek()))) {
            const std::string word = identifier();
            if (word == "pi") {
                return kTwoPi / 2.0;
            }
            fail("unknown constant '" + word + "' (only 'pi' is supported)");
        }
        if (pos_ >= text_.size() || !(std::isdigit(peek()) || peek() == '.')) {
            fail("expected a number or 'pi'");
        }
        std::string num;
        while (pos_ < text_.size() &&
               (std::isdigit(peek()) || peek() == '.' || peek() == 'e' || peek() == 'E' ||
                ((peek() == '+' || peek() == '-') && !num.empty() &&
                 (num.back() == 'e' || num.back() == 'E')))) {
            num.push_back(advance());
        }
        try {
            return std::stod(num);
        } catch (const std::exception&) {
            fail("malformed numeric literal '" + num + "'");
        }
    }

    char peek() const { return text_[pos_]; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && peek() != '\n') {
                    advance();
                }
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int mark_line_ = 1;
    int mark_col_ = 1;
};

}  // namespace detail

/// Parses the emitted subset back into a gate list. Gates outside
/// {ry, rz, cx, measure} are rejected with the offending name; syntax
/// errors carry line and column.
inline ParsedQasm parse_qasm(const std::string& text) {
    detail::QasmScanner scan(text);
    ParsedQasm out;

    auto qubit_ref = [&](const std::string& reg) {
        scan.mark();
        const std::string name = scan.identifier();
        if (name != reg) {
            scan.fail("expected register '" + reg + "', got '" + name + "'");
        }
        scan.expect('[');
        const int idx = scan.integer();
        scan.expect(']');
        return idx;
    };
    auto check_qubit = [&](int q) {
        if (out.n_qubits <= 0) {
            scan.fail("gate before qreg declaration");
        }
        if (q < 0 || q >= out.n_qubits) {
            scan.fail("qubit index " + std::to_string(q) + " out of range");
        }
    };

    // Header.
    scan.mark();
    const std::string head = scan.identifier();
    if (head != "OPENQASM") {
        scan.fail("file must start with 'OPENQASM 2.0;'");
    }
    scan.mark();
    const double version = scan.const_expr();
    if (version != 2.0) {
        scan.fail("unsupported OPENQASM version");
    }
    scan.expect(';');

    bool measured = false;
    while (!scan.at_end()) {
        scan.mark();
        const std::string word = scan.identifier();
        if (word == "include") {
            scan.quoted_string();
            scan.expect(';');
        } else if (word == "qreg") {
            if (out.n_qubits > 0) {
                scan.fail("multiple qreg declarations");
            }
            const std::string name = scan.identifier();
            if (name != "q") {
                scan.fail("expected register name 'q'");
            }
            scan.expect('[');
            out.n_qubits = scan.integer();
            scan.expect(']');
            scan.expect(';');
            if (out.n_qubits < 1) {
                scan.fail("qreg must hold at least one qubit");
            }
        } else if (word == "creg") {
            scan.identifier();
            scan.expect('[');
            scan.integer();
            scan.expect(']');
            scan.expect(';');
        } else if (word == "ry" || word == "rz") {
            scan.expect('(');
            const double angle = scan.const_expr();
            scan.expect(')');
            const int q = qubit_ref("q");
            scan.expect(';');
            check_qubit(q);
            out.gates.push_back(word == "ry" ? GateOp::make_ry(q, angle)
                                             : GateOp::make_rz(q, angle));
            out.angles.push_back(angle);
        } else if (word == "cx") {
            const int control = qubit_ref("q");
            scan.expect(',');
            const int target = qubit_ref("q");
            scan.expect(';');
            check_qubit(control);
            check_qubit(target);
            if (control == target) {
                scan.fail("cx control equals target");
            }
            out.gates.push_back(GateOp::make_cx(control, target));
        } else if (word == "measure") {
            const std::string name = scan.identifier();
            if (name != "q") {
                scan.fail("expected register name 'q'");
            }
            if (scan.accept('[')) {
                const int q = scan.integer();
                scan.expect(']');
                scan.expect_arrow();
                qubit_ref("c");
                check_qubit(q);
            } else {
                scan.expect_arrow();
                scan.identifier();
            }
            scan.expect(';');
            measured = true;
        } else {
            scan.fail("unsupported gate '" + word + "' (subset: ry, rz, cx, measure)");
        }
    }
    if (out.n_qubits == 0) {
        throw qasm_error(1, 1, "missing qreg declaration");
    }
    (void)measured;
    return out;
}

}  // namespace treeprep
