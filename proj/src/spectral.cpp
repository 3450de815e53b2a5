#include "qkc/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

namespace qkc {

namespace {

void check_common(const SpectralConfig& config) {
    if (config.kmeans_restarts < 1 || config.kmeans_max_iter < 1) {
        throw std::invalid_argument("spectral kmeans_restarts and kmeans_max_iter must be >= 1");
    }
    if (!(config.eig_tolerance > 0.0)) {
        throw std::invalid_argument("eig_tolerance must be positive");
    }
}

}  // namespace

SpectralBasis spectral_basis(const KernelMatrix& kernel, const SpectralConfig& config,
                             int k_max) {
    check_common(config);
    const Eigen::Index n = kernel.n();
    if (n < 1) {
        throw std::invalid_argument("kernel matrix is empty");
    }
    if (kernel.values.cols() != n) {
        throw std::invalid_argument("kernel matrix is not square");
    }
    if (k_max < 1 || k_max > n) {
        throw std::invalid_argument("embedding dimension must lie in [1, " + std::to_string(n) +
                                    "], got " + std::to_string(k_max));
    }
    if (!kernel.values.allFinite()) {
        throw std::invalid_argument("kernel matrix contains non-finite entries");
    }
    if ((kernel.values - kernel.values.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("kernel matrix is not symmetric");
    }

    // Affinity: off-diagonal kernel entries, negatives clamped to 0.
    Eigen::MatrixXd affinity = kernel.values.cwiseMax(0.0);
    affinity.diagonal().setZero();

    const Eigen::VectorXd degree = affinity.rowwise().sum();
    SpectralBasis basis;
    Eigen::VectorXd inv_sqrt_degree(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (degree(i) > 0.0) {
            inv_sqrt_degree(i) = 1.0 / std::sqrt(degree(i));
        } else {
            inv_sqrt_degree(i) = 0.0;
            basis.isolated.push_back(static_cast<int>(i));
        }
    }

    Eigen::MatrixXd laplacian;
    if (config.laplacian == LaplacianKind::SymmetricNormalized) {
        // L = I - D^{-1/2} A D^{-1/2}, isolated vertices contribute identity rows.
        laplacian = Eigen::MatrixXd::Identity(n, n) -
                    inv_sqrt_degree.asDiagonal() * affinity * inv_sqrt_degree.asDiagonal();
    } else {
        laplacian = Eigen::MatrixXd(degree.asDiagonal()) - affinity;
    }
    // Exact symmetry guards the eigensolver against rounding asymmetry.
    laplacian = ((laplacian + laplacian.transpose()) * 0.5).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("laplacian eigendecomposition failed to converge");
    }
    basis.vectors = solver.eigenvectors().leftCols(k_max);
    basis.values = solver.eigenvalues().head(k_max);
    for (int c = 0; c < k_max; ++c) {
        const double residual =
            (laplacian * basis.vectors.col(c) - basis.values(c) * basis.vectors.col(c)).norm();
        if (residual > config.eig_tolerance) {
            throw std::runtime_error("eigenpair " + std::to_string(c) + " residual " +
                                     std::to_string(residual) + " exceeds tolerance");
        }
    }
    return basis;
}

Eigen::MatrixXd embed_from_basis(const SpectralBasis& basis, int k) {
    if (k < 1 || k > basis.vectors.cols()) {
        throw std::invalid_argument("embedding slice needs 1 <= k <= " +
                                    std::to_string(basis.vectors.cols()) + ", got " +
                                    std::to_string(k));
    }
    Eigen::MatrixXd coords = basis.vectors.leftCols(k);
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        const double norm = coords.row(i).norm();
        if (norm > 0.0) coords.row(i) /= norm;
    }
    return coords;
}

SpectralEmbedding laplacian_embed(const KernelMatrix& kernel, const SpectralConfig& config) {
    SpectralBasis basis = spectral_basis(kernel, config, config.k);
    SpectralEmbedding embedding;
    embedding.coords = embed_from_basis(basis, config.k);
    embedding.isolated = std::move(basis.isolated);
    return embedding;
}

ClusterAssignment spectral_cluster(const KernelMatrix& kernel, const SpectralConfig& config) {
    if (config.k < 2) {
        throw std::invalid_argument("spectral clustering needs k >= 2, got " +
                                    std::to_string(config.k));
    }
    const SpectralEmbedding embedding = laplacian_embed(kernel, config);
    ClusterAssignment assignment = kmeans(embedding.coords, config.k, config.kmeans_restarts,
                                          config.kmeans_max_iter, config.seed);
    assignment.seed = config.seed;
    return assignment;
}

}  // namespace qkc
