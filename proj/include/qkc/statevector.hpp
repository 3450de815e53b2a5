#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qkc {

inline constexpr int kMaxQubits = 12;

// Dense state of an n-qubit register, n in [1, 12]. Amplitude index bit q
// holds the value of qubit q, so qubit 0 is the least significant bit.
struct Statevector {
    int n_qubits = 0;
    std::vector<std::complex<double>> amps;

    // |0...0> on n qubits.
    static Statevector zero(int n_qubits);

    std::size_t dim() const { return amps.size(); }

    // Sum of |amp|^2; 1 within rounding for any product of the supported gates.
    double norm_sq() const;
};

enum class GateKind { H, Phase, RZ, RZZ, CX };

// One gate application. Conventions (fixed; all angles in radians):
//   H          Hadamard on target.
//   Phase(t)   diag(1, e^{i t}) on target.
//   RZ(t)      diag(e^{-i t/2}, e^{+i t/2}) on target.
//   RZZ(t)     on (target, control_or_other): e^{-i t/2} on even-parity basis
//              states, e^{+i t/2} on odd parity.
//   CX         flips target when qubit `control_or_other` is 1.
struct Gate {
    GateKind kind = GateKind::H;
    int target = 0;
    int control_or_other = -1;  // second qubit for RZZ/CX, unused otherwise
    double theta = 0.0;         // rotation/phase angle, unused for H/CX

    static Gate h(int q) { return {GateKind::H, q, -1, 0.0}; }
    static Gate phase(int q, double theta) { return {GateKind::Phase, q, -1, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
    static Gate rzz(int a, int b, double theta) { return {GateKind::RZZ, a, b, theta}; }
    static Gate cx(int control, int target) { return {GateKind::CX, target, control, 0.0}; }

    bool is_two_qubit() const { return kind == GateKind::RZZ || kind == GateKind::CX; }
};

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
};

struct CircuitStats {
    int n_gates = 0;         // gates as listed, RZZ counted once
    int depth = 0;           // longest dependency chain over shared qubits
    int two_qubit_count = 0; // CX count after expanding each RZZ into CX-Phase-CX
};

// Applies one gate in place. Throws std::invalid_argument on out-of-range or
// coincident qubit indices.
void apply_gate(Statevector& state, const Gate& gate);

// Runs the circuit on |0...0>. Throws on invalid qubit count or gate indices.
Statevector run_circuit(const Circuit& circuit);

// |<a|b>|^2 clamped to [0, 1]. Throws if dimensions differ.
double fidelity(const Statevector& a, const Statevector& b);

CircuitStats circuit_stats(const Circuit& circuit);

// Gate-by-gate adjoint: reversed order, negated angles; H and CX self-inverse.
Circuit inverse(const Circuit& circuit);

// b appended after a. Throws if qubit counts differ.
Circuit concat(const Circuit& a, const Circuit& b);

}  // namespace qkc
