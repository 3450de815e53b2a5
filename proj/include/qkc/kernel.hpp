#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>

#include "qkc/feature_map.hpp"
#include "qkc/features.hpp"
#include "qkc/noise.hpp"

namespace qkc {

enum class KernelKind : std::uint64_t { QuantumExact = 0, QuantumSampled = 1, Rbf = 2 };

const char* kernel_kind_name(KernelKind kind);

// Symmetric N x N similarity matrix with unit diagonal. config_digest is a
// 16-hex-char fingerprint of the producing configuration, carried through
// serialization so downstream results can be traced to their kernel.
struct KernelMatrix {
    KernelKind kind = KernelKind::QuantumExact;
    Eigen::MatrixXd values;
    std::string config_digest;

    Eigen::Index n() const { return values.rows(); }
};

struct RbfConfig {
    double sigma = 1.0;
    // exp(-d^2 / (2 sigma^2)) when true; exp(-d / (2 sigma^2)) when false.
    bool squared_distance = true;
};

// Exact fidelity Gram matrix: K(i, j) = |<phi(x_i)|phi(x_j)>|^2 with states
// encoded once per sample. scaled holds one sample per row, entries already
// mapped into [0, config.beta]. Entries clamp to [0, 1]; diagonal is exactly
// 1. Throws std::invalid_argument on config/input violations.
KernelMatrix gram_exact(const FeatureMapConfig& config, const FeatureMatrix& scaled,
                        int n_threads = 1);

// Shot-based estimate of the same Gram matrix through the compute-uncompute
// circuit U(x_i)^dag U(x_j) under the stochastic Pauli noise model. Each
// unordered pair gets an independent sub-seed derived from (seed, i, j), so
// results do not depend on evaluation order or thread count. Diagonal is
// forced to 1.
KernelMatrix gram_sampled(const FeatureMapConfig& config, const FeatureMatrix& scaled,
                          const NoiseConfig& noise, std::uint64_t seed, int n_threads = 1);

// Classical RBF baseline on raw (unencoded) feature rows.
KernelMatrix gram_rbf(const FeatureMatrix& features, const RbfConfig& config);

// Binary round-trip: fixed 64-byte header (magic, version, n, kind, digest)
// followed by row-major float64 values, native byte order. load_kernel
// throws std::runtime_error on missing file, bad magic/version, or a payload
// that does not match the header's dimensions.
void save_kernel(const KernelMatrix& kernel, const std::filesystem::path& path);
KernelMatrix load_kernel(const std::filesystem::path& path);

// Plain-text dump for inspection: one comment line with kind/n/digest, then
// one CSV row per matrix row with full (%.17g) precision.
void save_kernel_csv(const KernelMatrix& kernel, const std::filesystem::path& path);

}  // namespace qkc
