#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "qkc/feature_map.hpp"
#include "qkc/features.hpp"
#include "test_helpers.hpp"

using namespace qkc;

namespace {

constexpr double kPi = 3.14159265358979323846;

FeatureMatrix random_features(int rows, int cols, unsigned seed, double lo = -3.0,
                              double hi = 5.0) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    FeatureMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = dist(engine);
    }
    return m;
}

}  // namespace

TEST_SUITE("encoding") {

TEST_CASE("scaler maps every column onto [0, bandwidth]") {
    const FeatureMatrix raw = random_features(40, 5, 7);
    const FeatureScaler scaler = FeatureScaler::fit(raw);
    const double beta = 1.9;
    const FeatureMatrix scaled = scaler.apply(raw, beta);
    REQUIRE(scaled.rows() == raw.rows());
    REQUIRE(scaled.cols() == raw.cols());
    for (int c = 0; c < scaled.cols(); ++c) {
        CHECK(scaled.col(c).minCoeff() == 0.0);
        CHECK(scaled.col(c).maxCoeff() == doctest::Approx(beta).epsilon(1e-15));
        CHECK(scaled.col(c).minCoeff() >= 0.0);
        CHECK(scaled.col(c).maxCoeff() <= beta);
    }
    CHECK(scaler.constant_columns().empty());
    CHECK(scaler.n_features() == 5);
}

TEST_CASE("scaling a row subset equals taking rows of the scaled matrix") {
    const FeatureMatrix raw = random_features(30, 4, 11);
    const FeatureScaler scaler = FeatureScaler::fit(raw);
    const double beta = kPi / 2.0;
    const FeatureMatrix all_scaled = scaler.apply(raw, beta);

    const std::vector<int> picks = {3, 7, 8, 19, 29};
    FeatureMatrix subset(static_cast<Eigen::Index>(picks.size()), raw.cols());
    for (std::size_t i = 0; i < picks.size(); ++i) subset.row(static_cast<Eigen::Index>(i)) = raw.row(picks[i]);

    const FeatureMatrix subset_scaled = scaler.apply(subset, beta);
    for (std::size_t i = 0; i < picks.size(); ++i) {
        for (int c = 0; c < raw.cols(); ++c) {
            // Bitwise equality: the same input goes through the same arithmetic.
            CHECK(subset_scaled(static_cast<Eigen::Index>(i), c) == all_scaled(picks[i], c));
        }
    }
}

TEST_CASE("scaled outputs are proportional across bandwidths") {
    const FeatureMatrix raw = random_features(12, 3, 2);
    const FeatureScaler scaler = FeatureScaler::fit(raw);
    const FeatureMatrix narrow = scaler.apply(raw, kPi / 4.0);
    const FeatureMatrix wide = scaler.apply(raw, 2.0 * kPi);
    CHECK((8.0 * narrow - wide).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("constant columns map to zero and are reported") {
    FeatureMatrix raw = random_features(10, 3, 3);
    raw.col(1).setConstant(4.25);
    const FeatureScaler scaler = FeatureScaler::fit(raw);
    REQUIRE(scaler.constant_columns() == std::vector<int>{1});
    const FeatureMatrix scaled = scaler.apply(raw, 1.0);
    CHECK(scaled.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(scaled.col(0).maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("scaler rejects bad input") {
    CHECK_THROWS_AS(FeatureScaler::fit(FeatureMatrix(0, 3)), std::invalid_argument);
    FeatureMatrix raw = random_features(5, 2, 4);
    raw(2, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(FeatureScaler::fit(raw), std::invalid_argument);
    raw(2, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(FeatureScaler::fit(raw), std::invalid_argument);

    raw(2, 1) = 0.0;
    const FeatureScaler scaler = FeatureScaler::fit(raw);
    CHECK_THROWS_AS(scaler.apply(raw, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(scaler.apply(random_features(5, 3, 5), 1.0), std::invalid_argument);
}

TEST_CASE("scaler digests distinguish fitted bounds") {
    const FeatureMatrix a = random_features(20, 3, 6);
    const FeatureMatrix b = random_features(20, 3, 66);
    CHECK(FeatureScaler::fit(a).digest() == FeatureScaler::fit(a).digest());
    CHECK(FeatureScaler::fit(a).digest() != FeatureScaler::fit(b).digest());
    CHECK(FeatureScaler::fit(a).digest().size() == 16);
}

TEST_CASE("entanglement sets per family") {
    CHECK(entanglement_pairs(FeatureFamily::Z, 4).empty());
    const EntanglementSet linear = entanglement_pairs(FeatureFamily::ZZLinear, 4);
    CHECK(linear == EntanglementSet{{0, 1}, {1, 2}, {2, 3}});
    const EntanglementSet full = entanglement_pairs(FeatureFamily::ZZFull, 4);
    CHECK(full == EntanglementSet{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(entanglement_pairs(FeatureFamily::ZZLinear, 1).empty());
    CHECK(entanglement_pairs(FeatureFamily::ZZFull, 2) == EntanglementSet{{0, 1}});
}

TEST_CASE("one repetition emits H layer, data phases, then pair rotations") {
    FeatureMapConfig config;
    config.family = FeatureFamily::ZZLinear;
    config.n_qubits = 2;
    config.reps = 1;
    config.beta = 2.0;
    Eigen::VectorXd x(2);
    x << 0.3, 1.7;

    const Circuit circuit = build_feature_map(config, x);
    REQUIRE(circuit.n_qubits == 2);
    REQUIRE(circuit.gates.size() == 5);
    CHECK(circuit.gates[0].kind == GateKind::H);
    CHECK(circuit.gates[0].target == 0);
    CHECK(circuit.gates[1].kind == GateKind::H);
    CHECK(circuit.gates[1].target == 1);
    CHECK(circuit.gates[2].kind == GateKind::Phase);
    CHECK(circuit.gates[2].theta == 2.0 * 0.3);
    CHECK(circuit.gates[3].kind == GateKind::Phase);
    CHECK(circuit.gates[3].theta == 2.0 * 1.7);
    CHECK(circuit.gates[4].kind == GateKind::RZZ);
    CHECK(circuit.gates[4].theta == 2.0 * 0.3 * 1.7);

    config.reps = 3;
    CHECK(build_feature_map(config, x).gates.size() == 15);

    config.reps = 1;
    config.pair_phase = PairPhase::HavlicekPi;
    const Circuit havlicek = build_feature_map(config, x);
    CHECK(havlicek.gates[4].theta == doctest::Approx(2.0 * (kPi - 0.3) * (kPi - 1.7)).epsilon(1e-15));
}

TEST_CASE("single-qubit map gives fidelity cos^2(a - b)") {
    FeatureMapConfig config;
    config.family = FeatureFamily::Z;
    config.n_qubits = 1;
    config.reps = 1;
    config.beta = 2.0 * kPi;
    for (double a : {0.0, 0.4, 1.3, 2.9}) {
        for (double b : {0.1, 1.1, 2.2, 5.5}) {
            Eigen::VectorXd xa(1), xb(1);
            xa << a;
            xb << b;
            const double f = fidelity(encode(config, xa), encode(config, xb));
            const double c = std::cos(a - b);
            CHECK(f == doctest::Approx(c * c).epsilon(1e-12));
        }
    }
}

TEST_CASE("no-coupling map factorizes into per-feature cosines") {
    FeatureMapConfig config;
    config.family = FeatureFamily::Z;
    config.n_qubits = 4;
    config.reps = 1;
    config.beta = kPi;
    std::mt19937_64 engine(15);
    std::uniform_real_distribution<double> dist(0.0, kPi);
    for (int trial = 0; trial < 6; ++trial) {
        Eigen::VectorXd xa(4), xb(4);
        for (int q = 0; q < 4; ++q) {
            xa(q) = dist(engine);
            xb(q) = dist(engine);
        }
        double expected = 1.0;
        for (int q = 0; q < 4; ++q) {
            const double c = std::cos(xa(q) - xb(q));
            expected *= c * c;
        }
        const double f = fidelity(encode(config, xa), encode(config, xb));
        CHECK(f == doctest::Approx(expected).epsilon(1e-11));
    }
}

TEST_CASE("fully-coupled fidelity is invariant under feature permutation") {
    FeatureMapConfig config;
    config.family = FeatureFamily::ZZFull;
    config.n_qubits = 3;
    config.reps = 2;
    config.beta = 2.0;
    Eigen::VectorXd xa(3), xb(3);
    xa << 0.2, 1.1, 1.9;
    xb << 0.7, 0.05, 1.4;
    const double base = fidelity(encode(config, xa), encode(config, xb));

    const int perm[3] = {2, 0, 1};
    Eigen::VectorXd pa(3), pb(3);
    for (int q = 0; q < 3; ++q) {
        pa(q) = xa(perm[q]);
        pb(q) = xb(perm[q]);
    }
    const double permuted = fidelity(encode(config, pa), encode(config, pb));
    CHECK(permuted == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("pair-rotation order does not change the state") {
    FeatureMapConfig config;
    config.family = FeatureFamily::ZZFull;
    config.n_qubits = 3;
    config.reps = 1;
    config.beta = 2.0;
    Eigen::VectorXd x(3);
    x << 0.4, 1.5, 0.9;
    const EntanglementSet forward = entanglement_pairs(FeatureFamily::ZZFull, 3);
    EntanglementSet reversed(forward.rbegin(), forward.rend());
    const Statevector a = run_circuit(build_feature_map_with_pairs(config, forward, x));
    const Statevector b = run_circuit(build_feature_map_with_pairs(config, reversed, x));
    CHECK(testutil::max_diff(a, testutil::to_eigen(b)) <= 1e-14);
}

TEST_CASE("encode equals running the built circuit") {
    FeatureMapConfig config;
    config.family = FeatureFamily::ZZLinear;
    config.n_qubits = 3;
    config.reps = 2;
    config.beta = 1.5;
    Eigen::VectorXd x(3);
    x << 0.1, 1.2, 0.8;
    const Statevector direct = encode(config, x);
    const Statevector via_circuit = run_circuit(build_feature_map(config, x));
    CHECK(testutil::max_diff(direct, testutil::to_eigen(via_circuit)) == 0.0);
    CHECK(direct.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("configuration and input validation") {
    FeatureMapConfig config;
    config.family = FeatureFamily::Z;
    config.n_qubits = 2;
    config.reps = 1;
    config.beta = 1.0;
    config.validate();  // valid baseline

    FeatureMapConfig bad = config;
    bad.n_qubits = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.n_qubits = 13;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = config;
    bad.reps = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = config;
    bad.beta = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.beta = 2.0 * kPi + 1e-3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.beta = 2.0 * kPi;  // boundary included
    bad.validate();

    Eigen::VectorXd wrong_size(3);
    wrong_size << 0.1, 0.2, 0.3;
    CHECK_THROWS_AS(build_feature_map(config, wrong_size), std::invalid_argument);

    Eigen::VectorXd out_of_range(2);
    out_of_range << 0.5, 1.2;  // above beta = 1.0
    CHECK_THROWS_AS(build_feature_map(config, out_of_range), std::invalid_argument);
    out_of_range << -0.2, 0.5;
    CHECK_THROWS_AS(build_feature_map(config, out_of_range), std::invalid_argument);

    Eigen::VectorXd ok(2);
    ok << 0.0, 1.0;  // endpoints allowed
    build_feature_map(config, ok);

    CHECK_THROWS_AS(build_feature_map_with_pairs(config, {{0, 0}}, ok), std::invalid_argument);
    CHECK_THROWS_AS(build_feature_map_with_pairs(config, {{0, 2}}, ok), std::invalid_argument);
}

}  // TEST_SUITE
