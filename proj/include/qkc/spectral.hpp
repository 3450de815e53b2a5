#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qkc/kernel.hpp"
#include "qkc/kmeans.hpp"

namespace qkc {

enum class LaplacianKind { SymmetricNormalized, Unnormalized };

struct SpectralConfig {
    int k = 2;  // clusters / embedding dimensions
    LaplacianKind laplacian = LaplacianKind::SymmetricNormalized;
    int kmeans_restarts = 16;
    int kmeans_max_iter = 300;
    double eig_tolerance = 1e-8;  // max allowed ||L v - lambda v||
    std::uint64_t seed = 0;
};

// Eigensystem of the graph Laplacian built from a kernel matrix, computed
// once and sliceable for several k values. The affinity is the kernel with
// its diagonal zeroed and negative entries clamped to 0; vertices with zero
// affinity degree are flagged as isolated and use D^{-1/2} = 0.
struct SpectralBasis {
    Eigen::MatrixXd vectors;  // columns = eigenvectors, ascending eigenvalues
    Eigen::VectorXd values;
    std::vector<int> isolated;  // zero-degree vertex indices, ascending
};

struct SpectralEmbedding {
    Eigen::MatrixXd coords;     // N x k, rows unit-normalized (zero rows kept)
    std::vector<int> isolated;  // as in SpectralBasis
};

// Computes the k_max lowest eigenpairs of the Laplacian chosen by
// config.laplacian and verifies each residual against config.eig_tolerance.
// Throws std::invalid_argument on bad k_max / non-symmetric kernels and
// std::runtime_error when the eigensolver fails or a residual is too large.
SpectralBasis spectral_basis(const KernelMatrix& kernel, const SpectralConfig& config, int k_max);

// First k basis columns with row-wise unit normalization.
Eigen::MatrixXd embed_from_basis(const SpectralBasis& basis, int k);

// spectral_basis + embed_from_basis at k = config.k (1 <= k <= N).
SpectralEmbedding laplacian_embed(const KernelMatrix& kernel, const SpectralConfig& config);

// Full pipeline: embed, then kmeans on embedding rows (2 <= k <= N).
ClusterAssignment spectral_cluster(const KernelMatrix& kernel, const SpectralConfig& config);

}  // namespace qkc
