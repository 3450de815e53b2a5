#include "qkc/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkc {

namespace {

void check_qubit_count(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                                    "], got " + std::to_string(n_qubits));
    }
}

void check_gate_indices(const Gate& gate, int n_qubits) {
    auto in_range = [n_qubits](int q) { return q >= 0 && q < n_qubits; };
    if (!in_range(gate.target)) {
        throw std::invalid_argument("gate target qubit " + std::to_string(gate.target) +
                                    " out of range for " + std::to_string(n_qubits) + " qubits");
    }
    if (gate.is_two_qubit()) {
        if (!in_range(gate.control_or_other)) {
            throw std::invalid_argument("gate second qubit " +
                                        std::to_string(gate.control_or_other) +
                                        " out of range for " + std::to_string(n_qubits) +
                                        " qubits");
        }
        if (gate.control_or_other == gate.target) {
            throw std::invalid_argument("two-qubit gate needs distinct qubits, both are " +
                                        std::to_string(gate.target));
        }
    }
}

}  // namespace

Statevector Statevector::zero(int n_qubits) {
    check_qubit_count(n_qubits);
    Statevector state;
    state.n_qubits = n_qubits;
    state.amps.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    state.amps[0] = {1.0, 0.0};
    return state;
}

double Statevector::norm_sq() const {
    double total = 0.0;
    for (const auto& a : amps) total += std::norm(a);
    return total;
}

void apply_gate(Statevector& state, const Gate& gate) {
    check_qubit_count(state.n_qubits);
    check_gate_indices(gate, state.n_qubits);
    auto& amps = state.amps;
    const std::size_t dim = amps.size();
    const std::size_t target_bit = std::size_t{1} << gate.target;

    switch (gate.kind) {
        case GateKind::H: {
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            // Visit each (target=0, target=1) amplitude pair once via indices
            // with the target bit clear.
            for (std::size_t i = 0; i < dim; ++i) {
                if (i & target_bit) continue;
                const std::complex<double> a0 = amps[i];
                const std::complex<double> a1 = amps[i | target_bit];
                amps[i] = inv_sqrt2 * (a0 + a1);
                amps[i | target_bit] = inv_sqrt2 * (a0 - a1);
            }
            break;
        }
        case GateKind::Phase: {
            const std::complex<double> phase = std::polar(1.0, gate.theta);
            for (std::size_t i = 0; i < dim; ++i) {
                if (i & target_bit) amps[i] *= phase;
            }
            break;
        }
        case GateKind::RZ: {
            const std::complex<double> minus = std::polar(1.0, -0.5 * gate.theta);
            const std::complex<double> plus = std::polar(1.0, +0.5 * gate.theta);
            for (std::size_t i = 0; i < dim; ++i) {
                amps[i] *= (i & target_bit) ? plus : minus;
            }
            break;
        }
        case GateKind::RZZ: {
            const std::size_t other_bit = std::size_t{1} << gate.control_or_other;
            const std::complex<double> even = std::polar(1.0, -0.5 * gate.theta);
            const std::complex<double> odd = std::polar(1.0, +0.5 * gate.theta);
            for (std::size_t i = 0; i < dim; ++i) {
                const bool parity = ((i & target_bit) != 0) != ((i & other_bit) != 0);
                amps[i] *= parity ? odd : even;
            }
            break;
        }
        case GateKind::CX: {
            const std::size_t control_bit = std::size_t{1} << gate.control_or_other;
            for (std::size_t i = 0; i < dim; ++i) {
                // Swap each |c=1,t=0> amplitude with its |c=1,t=1> partner.
                if ((i & control_bit) && !(i & target_bit)) {
                    std::swap(amps[i], amps[i | target_bit]);
                }
            }
            break;
        }
    }
}

Statevector run_circuit(const Circuit& circuit) {
    Statevector state = Statevector::zero(circuit.n_qubits);
    for (const Gate& gate : circuit.gates) apply_gate(state, gate);
    return state;
}

double fidelity(const Statevector& a, const Statevector& b) {
    if (a.n_qubits != b.n_qubits || a.amps.size() != b.amps.size()) {
        throw std::invalid_argument("fidelity needs states of equal dimension, got " +
                                    std::to_string(a.amps.size()) + " and " +
                                    std::to_string(b.amps.size()));
    }
    std::complex<double> overlap = {0.0, 0.0};
    for (std::size_t i = 0; i < a.amps.size(); ++i) {
        overlap += std::conj(a.amps[i]) * b.amps[i];
    }
    const double value = std::norm(overlap);
    if (value < 0.0) return 0.0;
    if (value > 1.0) return 1.0;
    return value;
}

CircuitStats circuit_stats(const Circuit& circuit) {
    check_qubit_count(circuit.n_qubits);
    CircuitStats stats;
    stats.n_gates = static_cast<int>(circuit.gates.size());
    // Depth: each gate lands one layer after the latest layer already
    // occupied on any qubit it touches.
    std::vector<int> frontier(static_cast<std::size_t>(circuit.n_qubits), 0);
    for (const Gate& gate : circuit.gates) {
        check_gate_indices(gate, circuit.n_qubits);
        int layer = frontier[static_cast<std::size_t>(gate.target)];
        if (gate.is_two_qubit()) {
            layer = std::max(layer, frontier[static_cast<std::size_t>(gate.control_or_other)]);
        }
        ++layer;
        frontier[static_cast<std::size_t>(gate.target)] = layer;
        if (gate.is_two_qubit()) {
            frontier[static_cast<std::size_t>(gate.control_or_other)] = layer;
        }
        stats.depth = std::max(stats.depth, layer);
        if (gate.kind == GateKind::CX) stats.two_qubit_count += 1;
        if (gate.kind == GateKind::RZZ) stats.two_qubit_count += 2;  // CX-Phase-CX expansion
    }
    return stats;
}

Circuit inverse(const Circuit& circuit) {
    Circuit inv;
    inv.n_qubits = circuit.n_qubits;
    inv.gates.reserve(circuit.gates.size());
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        Gate gate = *it;
        if (gate.kind == GateKind::Phase || gate.kind == GateKind::RZ ||
            gate.kind == GateKind::RZZ) {
            gate.theta = -gate.theta;
        }
        inv.gates.push_back(gate);
    }
    return inv;
}

Circuit concat(const Circuit& a, const Circuit& b) {
    if (a.n_qubits != b.n_qubits) {
        throw std::invalid_argument("cannot concatenate circuits on " +
                                    std::to_string(a.n_qubits) + " and " +
                                    std::to_string(b.n_qubits) + " qubits");
    }
    Circuit out = a;
    out.gates.insert(out.gates.end(), b.gates.begin(), b.gates.end());
    return out;
}

}  // namespace qkc
