#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qkc/kernel.hpp"

namespace qkc {

using DistanceMatrix = Eigen::MatrixXd;

// Cluster labels in canonical form: ids are contiguous from 0 in order of
// first appearance, so two partitions are equal up to relabeling iff their
// canonical labels match.
struct Partition {
    std::vector<int> labels;
    int n_clusters = 0;

    // Canonicalizes arbitrary integer labels. Throws on empty input.
    static Partition from_labels(const std::vector<int>& raw);

    std::vector<int> sizes() const;  // per-cluster counts, indexed by label
    int n() const { return static_cast<int>(labels.size()); }
};

struct MetricsReport {
    double silhouette = 0.0;
    double mi = 0.0;
    double expected_mi = 0.0;
    double ami = 0.0;
};

// Kernel-induced distance d(i, j) = sqrt(2 - 2 K(i, j)), clamped at 0.
// Requires unit diagonal; throws std::invalid_argument when any entry
// exceeds 1 + 1e-9.
DistanceMatrix kernel_distance(const KernelMatrix& kernel);

// Mean silhouette width over all points: a = mean distance to own cluster
// (excluding self), b = lowest mean distance to another cluster,
// s = (b - a) / max(a, b). Singleton clusters score 0, as does a == b == 0.
// Throws std::invalid_argument on dimension mismatch or fewer than two
// clusters.
double silhouette(const DistanceMatrix& distances, const Partition& partition);

// Shannon entropy of the label distribution, in nats.
double entropy(const Partition& partition);

// Mutual information between two partitions of the same points, in nats.
double mutual_information(const Partition& u, const Partition& v);

// Exact expectation of mutual_information(u', v) over uniformly random
// permutations u' of u's labels (hypergeometric null), evaluated in log
// space via accumulated log-factorials.
double expected_mi(const Partition& u, const Partition& v);

// Adjusted mutual information with max-entropy normalization:
// (MI - EMI) / (max(H(u), H(v)) - EMI). A vanishing denominator yields 1
// when the partitions match up to relabeling and 0 otherwise.
double ami(const Partition& u, const Partition& v);

// Convenience bundle: silhouette of `predicted` on `distances` plus the
// information-theoretic agreement between `predicted` and `reference`.
MetricsReport summarize(const DistanceMatrix& distances, const Partition& predicted,
                        const Partition& reference);

}  // namespace qkc
