#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace qkc {

struct ClusterAssignment {
    std::vector<int> labels;  // one entry per point, values in [0, k)
    int k = 0;
    std::uint64_t seed = 0;
    double inertia = 0.0;  // sum of squared distances to assigned centroids
};

// Lloyd's algorithm with k-means++ seeding. Runs `restarts` independent
// initializations (restart r uses a sub-seed derived from (seed, r)) and
// keeps the lowest-inertia result, ties resolved toward the earlier restart.
// Point-to-centroid ties resolve toward the lower centroid index, so equal
// points always land in the same cluster. A cluster that empties during an
// iteration is re-seeded at the point farthest from its assigned centroid.
// Requires 1 <= k <= #points, restarts >= 1, max_iter >= 1, finite inputs.
ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, int restarts, int max_iter,
                         std::uint64_t seed);

}  // namespace qkc
