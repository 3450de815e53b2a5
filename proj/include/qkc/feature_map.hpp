#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "qkc/statevector.hpp"

namespace qkc {

enum class FeatureFamily { Z, ZZLinear, ZZFull };

enum class PairPhase {
    Product,     // angle(x_a, x_b) = x_a * x_b
    HavlicekPi,  // angle(x_a, x_b) = (pi - x_a) * (pi - x_b)
};

// Qubit pairs receiving an entangling rotation; indices distinct and < n.
using EntanglementSet = std::vector<std::pair<int, int>>;

// Diagonal-plus-Hadamard feature map. One repetition applies H on every
// qubit, a per-qubit phase of 2*x_q, then a two-qubit phase rotation of
// 2*angle(x_a, x_b) for each pair in the entanglement set.
struct FeatureMapConfig {
    FeatureFamily family = FeatureFamily::Z;
    int n_qubits = 0;   // one qubit per feature
    int reps = 2;       // encoding repetitions
    double beta = 0.0;  // bandwidth used to scale inputs; angles expected in [0, beta]
    PairPhase pair_phase = PairPhase::Product;

    // Throws std::invalid_argument unless n_qubits is in [1, 12], reps >= 1
    // and beta is in (0, 2*pi].
    void validate() const;
};

// Z -> empty; ZZLinear -> {(q, q+1)}; ZZFull -> all pairs, lexicographic.
EntanglementSet entanglement_pairs(FeatureFamily family, int n_qubits);

// Stable spellings used in reports, digests and config files.
const char* family_name(FeatureFamily family);
const char* pair_phase_name(PairPhase phase);

// Feature-map circuit for one sample. x must have n_qubits entries inside
// [0, beta] (tiny rounding slack allowed). Throws std::invalid_argument on
// size/range violations.
Circuit build_feature_map(const FeatureMapConfig& config, const Eigen::VectorXd& x);

// Same construction with an explicit entanglement set (config.family is
// ignored). Pairs must have distinct in-range indices.
Circuit build_feature_map_with_pairs(const FeatureMapConfig& config, const EntanglementSet& pairs,
                                     const Eigen::VectorXd& x);

// Statevector of the feature map applied to |0...0>.
Statevector encode(const FeatureMapConfig& config, const Eigen::VectorXd& x);

}  // namespace qkc
