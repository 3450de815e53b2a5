#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qkc {

// Samples are rows, features are columns.
using FeatureMatrix = Eigen::MatrixXd;

// Per-column min-max scaler mapping each feature to [0, bandwidth] radians.
// Fit once on the full dataset and reuse on subsets so that a subset's rows
// scale identically to the same rows within the full matrix.
class FeatureScaler {
  public:
    // Records per-column min/max. Throws std::invalid_argument on an empty
    // matrix or non-finite entries. Constant columns are allowed; they map
    // to 0 and are reported via constant_columns().
    static FeatureScaler fit(const FeatureMatrix& raw);

    // (x - min) / (max - min) * bandwidth per column; constant columns emit
    // 0. Requires bandwidth > 0 and the fitted column count. Out-of-range
    // inputs are not clamped: f(subset of fitted data) stays in [0, bandwidth].
    FeatureMatrix apply(const FeatureMatrix& raw, double bandwidth) const;

    // Column indices with max == min, in ascending order.
    const std::vector<int>& constant_columns() const { return constant_columns_; }

    Eigen::Index n_features() const { return col_min_.size(); }

    // Digest of the fitted bounds; lets kernel provenance distinguish scalers.
    std::string digest() const;

  private:
    Eigen::VectorXd col_min_;
    Eigen::VectorXd col_max_;
    std::vector<int> constant_columns_;
};

}  // namespace qkc
