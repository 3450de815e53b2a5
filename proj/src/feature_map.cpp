#include "qkc/feature_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkc {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
// Slack for inputs that are nominally in [0, beta] but carry rounding error.
constexpr double kRangeSlack = 1e-9;

double pair_angle(PairPhase phase, double a, double b) {
    switch (phase) {
        case PairPhase::Product:
            return a * b;
        case PairPhase::HavlicekPi:
            return (M_PI - a) * (M_PI - b);
    }
    throw std::logic_error("unreachable pair phase");
}

}  // namespace

void FeatureMapConfig::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("feature map needs 1..12 qubits, got " +
                                    std::to_string(n_qubits));
    }
    if (reps < 1) {
        throw std::invalid_argument("feature map repetitions must be >= 1, got " +
                                    std::to_string(reps));
    }
    if (!(beta > 0.0) || beta > kTwoPi + kRangeSlack) {
        throw std::invalid_argument("beta must lie in (0, 2*pi], got " + std::to_string(beta));
    }
}

const char* family_name(FeatureFamily family) {
    switch (family) {
        case FeatureFamily::Z: return "Z";
        case FeatureFamily::ZZLinear: return "ZZLinear";
        case FeatureFamily::ZZFull: return "ZZFull";
    }
    throw std::logic_error("unreachable feature family");
}

const char* pair_phase_name(PairPhase phase) {
    switch (phase) {
        case PairPhase::Product: return "product";
        case PairPhase::HavlicekPi: return "havlicek_pi";
    }
    throw std::logic_error("unreachable pair phase");
}

EntanglementSet entanglement_pairs(FeatureFamily family, int n_qubits) {
    EntanglementSet pairs;
    switch (family) {
        case FeatureFamily::Z:
            break;
        case FeatureFamily::ZZLinear:
            for (int q = 0; q + 1 < n_qubits; ++q) pairs.emplace_back(q, q + 1);
            break;
        case FeatureFamily::ZZFull:
            for (int a = 0; a < n_qubits; ++a) {
                for (int b = a + 1; b < n_qubits; ++b) pairs.emplace_back(a, b);
            }
            break;
    }
    return pairs;
}

Circuit build_feature_map(const FeatureMapConfig& config, const Eigen::VectorXd& x) {
    return build_feature_map_with_pairs(config, entanglement_pairs(config.family, config.n_qubits),
                                        x);
}

Circuit build_feature_map_with_pairs(const FeatureMapConfig& config, const EntanglementSet& pairs,
                                     const Eigen::VectorXd& x) {
    config.validate();
    if (x.size() != config.n_qubits) {
        throw std::invalid_argument("expected " + std::to_string(config.n_qubits) +
                                    " features, got " + std::to_string(x.size()));
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x(i)) || x(i) < -kRangeSlack || x(i) > config.beta + kRangeSlack) {
            throw std::invalid_argument("feature " + std::to_string(i) + " value " +
                                        std::to_string(x(i)) + " outside [0, beta]");
        }
    }
    for (const auto& [a, b] : pairs) {
        if (a < 0 || a >= config.n_qubits || b < 0 || b >= config.n_qubits || a == b) {
            throw std::invalid_argument("entanglement pair (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ") invalid for " +
                                        std::to_string(config.n_qubits) + " qubits");
        }
    }

    Circuit circuit;
    circuit.n_qubits = config.n_qubits;
    const std::size_t per_rep =
        2 * static_cast<std::size_t>(config.n_qubits) + pairs.size();
    circuit.gates.reserve(per_rep * static_cast<std::size_t>(config.reps));
    for (int rep = 0; rep < config.reps; ++rep) {
        for (int q = 0; q < config.n_qubits; ++q) circuit.gates.push_back(Gate::h(q));
        for (int q = 0; q < config.n_qubits; ++q) {
            circuit.gates.push_back(Gate::phase(q, 2.0 * x(q)));
        }
        for (const auto& [a, b] : pairs) {
            circuit.gates.push_back(
                Gate::rzz(a, b, 2.0 * pair_angle(config.pair_phase, x(a), x(b))));
        }
    }
    return circuit;
}

Statevector encode(const FeatureMapConfig& config, const Eigen::VectorXd& x) {
    return run_circuit(build_feature_map(config, x));
}

}  // namespace qkc
