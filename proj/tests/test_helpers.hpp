#pragma once

// Dense-matrix reference implementations shared by the unit suites. Gates
// are expanded to full 2^n operators with explicit Kronecker products and
// applied by matrix-vector multiplication: slow, but independent of the
// production simulator's in-place amplitude indexing.

#include <Eigen/Dense>
#include <complex>

#include "qkc/statevector.hpp"

namespace testutil {

using Cmplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline CMat eye(Eigen::Index dim) { return CMat::Identity(dim, dim); }

inline CMat h_matrix() {
    CMat m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
}

inline CMat phase_matrix(double theta) {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = std::polar(1.0, theta);
    return m;
}

inline CMat rz_matrix(double theta) {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = std::polar(1.0, -0.5 * theta);
    m(1, 1) = std::polar(1.0, +0.5 * theta);
    return m;
}

inline CMat x_matrix() {
    CMat m = CMat::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

inline CMat y_matrix() {
    CMat m = CMat::Zero(2, 2);
    m(0, 1) = Cmplx(0.0, -1.0);
    m(1, 0) = Cmplx(0.0, 1.0);
    return m;
}

inline CMat z_matrix() {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

// Qubit q is bit q of the amplitude index, so the operator on q sits between
// identities of size 2^q (below) and 2^(n-1-q) (above).
inline CMat embed_single(int n_qubits, int q, const CMat& gate) {
    const Eigen::Index below = Eigen::Index{1} << q;
    const Eigen::Index above = Eigen::Index{1} << (n_qubits - 1 - q);
    return kron(eye(above), kron(gate, eye(below)));
}

// exp(-i theta/2 Z_a Z_b) = cos(theta/2) I - i sin(theta/2) Z_a Z_b, since
// (Z_a Z_b)^2 = I.
inline CMat rzz_full(int n_qubits, int a, int b, double theta) {
    const CMat zz = embed_single(n_qubits, a, z_matrix()) * embed_single(n_qubits, b, z_matrix());
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    return std::cos(0.5 * theta) * eye(dim) - Cmplx(0.0, 1.0) * std::sin(0.5 * theta) * zz;
}

inline CMat cx_full(int n_qubits, int control, int target) {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    CMat m = CMat::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const bool control_set = (i >> control) & 1;
        const Eigen::Index j = control_set ? (i ^ (Eigen::Index{1} << target)) : i;
        m(j, i) = 1.0;
    }
    return m;
}

inline CMat gate_full(int n_qubits, const qkc::Gate& gate) {
    switch (gate.kind) {
        case qkc::GateKind::H: return embed_single(n_qubits, gate.target, h_matrix());
        case qkc::GateKind::Phase:
            return embed_single(n_qubits, gate.target, phase_matrix(gate.theta));
        case qkc::GateKind::RZ: return embed_single(n_qubits, gate.target, rz_matrix(gate.theta));
        case qkc::GateKind::RZZ:
            return rzz_full(n_qubits, gate.target, gate.control_or_other, gate.theta);
        case qkc::GateKind::CX: return cx_full(n_qubits, gate.control_or_other, gate.target);
    }
    throw std::logic_error("unreachable gate kind");
}

inline CVec to_eigen(const qkc::Statevector& state) {
    CVec v(static_cast<Eigen::Index>(state.amps.size()));
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = state.amps[i];
    }
    return v;
}

inline double max_diff(const qkc::Statevector& state, const CVec& reference) {
    return (to_eigen(state) - reference).cwiseAbs().maxCoeff();
}

}  // namespace testutil
