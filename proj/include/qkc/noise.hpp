#pragma once

#include <cstdint>

#include "qkc/statevector.hpp"

namespace qkc {

// Stochastic Pauli-trajectory noise. After every gate, with probability p1
// (single-qubit) or p2 (two-qubit), one uniformly random non-identity Pauli
// is inserted on the gate's qubit(s); a two-qubit insertion draws from the 15
// non-identity pairs. Measured bits then flip independently with p_readout.
struct NoiseConfig {
    double p1 = 0.001;
    double p2 = 0.01;
    double p_readout = 0.02;
    int shots = 8192;

    // Throws std::invalid_argument unless probabilities are in [0, 1] and
    // shots >= 1.
    void validate() const;
};

// Applies X (1), Y (2) or Z (3) to one qubit in place.
void apply_pauli(Statevector& state, int qubit, int pauli);

// Estimates the all-zeros outcome probability of `circuit` by sampling
// noise.shots trajectories: each shot runs the circuit with random Pauli
// insertions, samples a computational-basis outcome, applies readout flips,
// and counts bitstring 0...0. For a compute-uncompute circuit U(x)^dag U(y)
// this estimates |<phi(x)|phi(y)>|^2. Deterministic in (circuit, noise, seed).
// Returns a value in [0, 1].
double sample_fidelity(const Circuit& circuit, const NoiseConfig& noise, std::uint64_t seed);

}  // namespace qkc
