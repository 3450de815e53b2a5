#include "qkc/kmeans.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "qkc/rng.hpp"

namespace qkc {

namespace {

struct SingleRun {
    std::vector<int> labels;
    double inertia = 0.0;
};

// k-means++: first center uniform, later centers weighted by squared
// distance to the nearest chosen center.
Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& points, int k, Rng& rng) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd centers(k, points.cols());
    centers.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
    Eigen::VectorXd dist2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist2(i) = (points.row(i) - centers.row(0)).squaredNorm();
    }
    for (int c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index pick;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += dist2(i);
                if (acc > u) {
                    pick = i;
                    break;
                }
            }
        } else {
            // Every point coincides with an existing center; any choice works.
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        }
        centers.row(c) = points.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            dist2(i) = std::min(dist2(i), (points.row(i) - centers.row(c)).squaredNorm());
        }
    }
    return centers;
}

SingleRun lloyd(const Eigen::MatrixXd& points, int k, int max_iter, Rng& rng) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd centers = seed_centers(points, k, rng);
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    Eigen::VectorXd best_d2(n);
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);

    auto assign_all = [&]() {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_val = (points.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d2 = (points.row(i) - centers.row(c)).squaredNorm();
                if (d2 < best_val) {  // strict: ties keep the lower index
                    best_val = d2;
                    best = c;
                }
            }
            labels[static_cast<std::size_t>(i)] = best;
            best_d2(i) = best_val;
            ++sizes[static_cast<std::size_t>(best)];
        }
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        const std::vector<int> previous = labels;
        assign_all();

        // Re-seed empty clusters at the point currently farthest from its
        // own centroid (lowest index on ties).
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) continue;
            Eigen::Index far = 0;
            for (Eigen::Index i = 1; i < n; ++i) {
                if (best_d2(i) > best_d2(far)) far = i;
            }
            const int donor = labels[static_cast<std::size_t>(far)];
            --sizes[static_cast<std::size_t>(donor)];
            labels[static_cast<std::size_t>(far)] = c;
            ++sizes[static_cast<std::size_t>(c)];
            centers.row(c) = points.row(far);
            best_d2(far) = 0.0;
        }

        // Centroid update: mean of members. Every cluster is non-empty here.
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
        }
        for (int c = 0; c < k; ++c) {
            centers.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
        }

        if (labels == previous) break;
    }

    SingleRun run;
    run.labels = labels;
    run.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        run.inertia += (points.row(i) - centers.row(labels[static_cast<std::size_t>(i)]))
                           .squaredNorm();
    }
    return run;
}

}  // namespace

ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, int restarts, int max_iter,
                         std::uint64_t seed) {
    if (points.rows() < 1) {
        throw std::invalid_argument("kmeans needs at least one point");
    }
    if (!points.allFinite()) {
        throw std::invalid_argument("kmeans input contains non-finite entries");
    }
    if (k < 1 || k > points.rows()) {
        throw std::invalid_argument("kmeans k must lie in [1, " + std::to_string(points.rows()) +
                                    "], got " + std::to_string(k));
    }
    if (restarts < 1 || max_iter < 1) {
        throw std::invalid_argument("kmeans restarts and max_iter must be >= 1");
    }

    ClusterAssignment best;
    best.k = k;
    best.seed = seed;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        SingleRun run = lloyd(points, k, max_iter, rng);
        if (run.inertia < best.inertia) {  // strict: ties keep the earlier restart
            best.inertia = run.inertia;
            best.labels = std::move(run.labels);
        }
    }
    return best;
}

}  // namespace qkc
