#include "qkc/noise.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qkc/rng.hpp"

namespace qkc {

namespace {

bool valid_prob(double p) { return p >= 0.0 && p <= 1.0; }

// Samples a basis-state index from cumulative outcome probabilities: the
// first index whose cumulative weight exceeds u.
std::size_t sample_outcome(const std::vector<double>& cdf, double u) {
    std::size_t lo = 0;
    std::size_t hi = cdf.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cdf[mid] > u) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

std::vector<double> outcome_cdf(const Statevector& state) {
    std::vector<double> cdf(state.amps.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        acc += std::norm(state.amps[i]);
        cdf[i] = acc;
    }
    return cdf;
}

}  // namespace

void NoiseConfig::validate() const {
    if (!valid_prob(p1) || !valid_prob(p2) || !valid_prob(p_readout)) {
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
    if (shots < 1) {
        throw std::invalid_argument("shots must be >= 1, got " + std::to_string(shots));
    }
}

void apply_pauli(Statevector& state, int qubit, int pauli) {
    if (qubit < 0 || qubit >= state.n_qubits) {
        throw std::invalid_argument("pauli qubit " + std::to_string(qubit) + " out of range");
    }
    auto& amps = state.amps;
    const std::size_t bit = std::size_t{1} << qubit;
    switch (pauli) {
        case 1:  // X: swap the two halves of each pair
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if (!(i & bit)) std::swap(amps[i], amps[i | bit]);
            }
            break;
        case 2:  // Y: |0> -> i|1>, |1> -> -i|0>
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if (!(i & bit)) {
                    const std::complex<double> a0 = amps[i];
                    const std::complex<double> a1 = amps[i | bit];
                    amps[i] = std::complex<double>(0.0, -1.0) * a1;
                    amps[i | bit] = std::complex<double>(0.0, 1.0) * a0;
                }
            }
            break;
        case 3:  // Z: negate the |1> half
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if (i & bit) amps[i] = -amps[i];
            }
            break;
        default:
            throw std::invalid_argument("pauli code must be 1 (X), 2 (Y) or 3 (Z)");
    }
}

double sample_fidelity(const Circuit& circuit, const NoiseConfig& noise, std::uint64_t seed) {
    noise.validate();

    // Prefix states: prefix[g] is the ideal state after the first g gates.
    // A shot whose first Pauli insertion lands after gate g resumes the
    // simulation from prefix[g + 1]; shots without any insertion reuse the
    // cached final-state outcome distribution and never touch amplitudes.
    const std::size_t n_gates = circuit.gates.size();
    std::vector<Statevector> prefix;
    prefix.reserve(n_gates + 1);
    prefix.push_back(Statevector::zero(circuit.n_qubits));
    for (const Gate& gate : circuit.gates) {
        Statevector next = prefix.back();
        apply_gate(next, gate);
        prefix.push_back(std::move(next));
    }
    const std::vector<double> clean_cdf = outcome_cdf(prefix.back());

    // Gates that can trigger an insertion, with their probability.
    std::vector<std::pair<std::size_t, double>> noisy_sites;
    for (std::size_t g = 0; g < n_gates; ++g) {
        const double p = circuit.gates[g].is_two_qubit() ? noise.p2 : noise.p1;
        if (p > 0.0) noisy_sites.emplace_back(g, p);
    }

    Rng rng(seed);
    Statevector work;  // scratch state, reused across disturbed shots
    long long zero_count = 0;
    for (int shot = 0; shot < noise.shots; ++shot) {
        bool disturbed = false;
        std::size_t pos = 0;  // index of the next gate work still needs
        for (const auto& [g, p] : noisy_sites) {
            if (rng.uniform() >= p) continue;
            if (!disturbed) {
                disturbed = true;
                work = prefix[g + 1];
            } else {
                for (std::size_t i = pos; i <= g; ++i) apply_gate(work, circuit.gates[i]);
            }
            pos = g + 1;
            const Gate& site = circuit.gates[g];
            if (site.is_two_qubit()) {
                // Uniform non-identity Pauli pair: code in [1, 15], base-4
                // digits select (I, X, Y, Z) per qubit.
                const int code = static_cast<int>(rng.index(15)) + 1;
                const int first = code / 4;
                const int second = code % 4;
                if (first != 0) apply_pauli(work, site.target, first);
                if (second != 0) apply_pauli(work, site.control_or_other, second);
            } else {
                apply_pauli(work, site.target, static_cast<int>(rng.index(3)) + 1);
            }
        }

        std::size_t outcome;
        if (disturbed) {
            for (std::size_t i = pos; i < n_gates; ++i) apply_gate(work, circuit.gates[i]);
            outcome = sample_outcome(outcome_cdf(work), rng.uniform());
        } else {
            outcome = sample_outcome(clean_cdf, rng.uniform());
        }
        if (noise.p_readout > 0.0) {
            for (int q = 0; q < circuit.n_qubits; ++q) {
                if (rng.uniform() < noise.p_readout) outcome ^= (std::size_t{1} << q);
            }
        }
        if (outcome == 0) ++zero_count;
    }
    return static_cast<double>(zero_count) / static_cast<double>(noise.shots);
}

}  // namespace qkc
