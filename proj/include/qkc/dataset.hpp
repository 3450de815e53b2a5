#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qkc/features.hpp"
#include "qkc/metrics.hpp"

namespace qkc {

// Tabular dataset: first CSV column is a unique sample id, the remaining
// columns are numeric features.
struct Dataset {
    std::vector<std::string> ids;
    std::vector<std::string> feature_names;
    FeatureMatrix features;  // one row per sample

    Eigen::Index n_samples() const { return features.rows(); }
};

// Parses a comma-separated file with a header row. Throws std::runtime_error
// naming the offending line and column on: unreadable file, ragged rows,
// duplicate ids, non-numeric or non-finite feature values, or no data rows.
Dataset ingest_csv(const std::filesystem::path& path);

// Isotropic Gaussian clusters with rejection-sampled centers at pairwise
// distance >= separation.
struct BlobData {
    FeatureMatrix features;   // cluster c occupies rows [c*per_cluster, ...)
    Partition labels;         // ground truth, cluster index per row
    Eigen::MatrixXd centers;  // one row per cluster
};

// Deterministic in all arguments. Requires per_cluster, clusters, dim >= 1
// and separation, spread > 0.
BlobData make_blobs(int per_cluster, int clusters, int dim, double separation, double spread,
                    std::uint64_t seed);

// Writers for the CLI: features.csv gets ids s0001... plus f0..f{d-1}
// columns in ingest_csv format; labels.csv gets id,label rows.
void save_blobs_csv(const BlobData& blobs, const std::filesystem::path& features_path,
                    const std::filesystem::path& labels_path);

}  // namespace qkc
