#include "qkc/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace qkc {

namespace {

constexpr double kUnitDiagSlack = 1e-9;

// counts(i, j) = #points with label i in u and label j in v.
Eigen::MatrixXi contingency(const Partition& u, const Partition& v) {
    if (u.labels.size() != v.labels.size()) {
        throw std::invalid_argument("partitions cover different point counts: " +
                                    std::to_string(u.labels.size()) + " vs " +
                                    std::to_string(v.labels.size()));
    }
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(u.n_clusters, v.n_clusters);
    for (std::size_t i = 0; i < u.labels.size(); ++i) {
        counts(u.labels[i], v.labels[i]) += 1;
    }
    return counts;
}

}  // namespace

Partition Partition::from_labels(const std::vector<int>& raw) {
    if (raw.empty()) {
        throw std::invalid_argument("partition needs at least one point");
    }
    Partition p;
    p.labels.reserve(raw.size());
    std::unordered_map<int, int> remap;
    for (int label : raw) {
        // emplace leaves the stored id untouched when the label is known.
        const auto it = remap.emplace(label, static_cast<int>(remap.size())).first;
        p.labels.push_back(it->second);
    }
    p.n_clusters = static_cast<int>(remap.size());
    return p;
}

std::vector<int> Partition::sizes() const {
    std::vector<int> counts(static_cast<std::size_t>(n_clusters), 0);
    for (int label : labels) ++counts[static_cast<std::size_t>(label)];
    return counts;
}

DistanceMatrix kernel_distance(const KernelMatrix& kernel) {
    const Eigen::Index n = kernel.n();
    if (n < 1 || kernel.values.cols() != n) {
        throw std::invalid_argument("kernel matrix must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(kernel.values(i, i) - 1.0) > kUnitDiagSlack) {
            throw std::invalid_argument("kernel diagonal entry " + std::to_string(i) +
                                        " is not 1");
        }
    }
    const double max_entry = kernel.values.maxCoeff();
    if (max_entry > 1.0 + kUnitDiagSlack) {
        throw std::invalid_argument("kernel entry " + std::to_string(max_entry) +
                                    " exceeds 1; not a valid similarity");
    }
    DistanceMatrix distances(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        distances(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double arg = 2.0 - 2.0 * kernel.values(i, j);
            const double d = arg > 0.0 ? std::sqrt(arg) : 0.0;
            distances(i, j) = d;
            distances(j, i) = d;
        }
    }
    return distances;
}

double silhouette(const DistanceMatrix& distances, const Partition& partition) {
    const Eigen::Index n = distances.rows();
    if (n != distances.cols() || static_cast<std::size_t>(n) != partition.labels.size()) {
        throw std::invalid_argument("distance matrix and partition sizes disagree");
    }
    if (partition.n_clusters < 2) {
        throw std::invalid_argument("silhouette needs at least two clusters");
    }
    const std::vector<int> sizes = partition.sizes();
    double total = 0.0;
    std::vector<double> cluster_sum(static_cast<std::size_t>(partition.n_clusters));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::fill(cluster_sum.begin(), cluster_sum.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            cluster_sum[static_cast<std::size_t>(partition.labels[static_cast<std::size_t>(j)])] +=
                distances(i, j);
        }
        const int own = partition.labels[static_cast<std::size_t>(i)];
        const int own_size = sizes[static_cast<std::size_t>(own)];
        if (own_size == 1) continue;  // singleton scores 0

        // Self-distance is 0, so the own-cluster sum needs no correction.
        const double a = cluster_sum[static_cast<std::size_t>(own)] / (own_size - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < partition.n_clusters; ++c) {
            if (c == own) continue;
            b = std::min(b, cluster_sum[static_cast<std::size_t>(c)] /
                                sizes[static_cast<std::size_t>(c)]);
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;  // a == b == 0 scores 0
    }
    return total / static_cast<double>(n);
}

double entropy(const Partition& partition) {
    const double n = static_cast<double>(partition.labels.size());
    double h = 0.0;
    for (int size : partition.sizes()) {
        if (size == 0) continue;
        const double p = static_cast<double>(size) / n;
        h -= p * std::log(p);
    }
    return h;
}

double mutual_information(const Partition& u, const Partition& v) {
    const Eigen::MatrixXi counts = contingency(u, v);
    const double n = static_cast<double>(u.labels.size());
    const std::vector<int> a = u.sizes();
    const std::vector<int> b = v.sizes();
    double mi = 0.0;
    for (Eigen::Index i = 0; i < counts.rows(); ++i) {
        for (Eigen::Index j = 0; j < counts.cols(); ++j) {
            const int nij = counts(i, j);
            if (nij == 0) continue;
            mi += (nij / n) * std::log(n * nij /
                                       (static_cast<double>(a[static_cast<std::size_t>(i)]) *
                                        static_cast<double>(b[static_cast<std::size_t>(j)])));
        }
    }
    return mi;
}

double expected_mi(const Partition& u, const Partition& v) {
    if (u.labels.size() != v.labels.size()) {
        throw std::invalid_argument("partitions cover different point counts");
    }
    const int n = static_cast<int>(u.labels.size());
    const std::vector<int> a = u.sizes();
    const std::vector<int> b = v.sizes();

    // log_fact[m] = ln(m!), built by accumulation for numerical consistency.
    std::vector<double> log_fact(static_cast<std::size_t>(n) + 1, 0.0);
    for (int m = 2; m <= n; ++m) {
        log_fact[static_cast<std::size_t>(m)] =
            log_fact[static_cast<std::size_t>(m - 1)] + std::log(static_cast<double>(m));
    }
    auto lf = [&](int m) { return log_fact[static_cast<std::size_t>(m)]; };

    // E[MI] = sum over cells and feasible nij of
    //   P_hypergeom(nij | ai, bj, n) * (nij/n) * ln(n*nij / (ai*bj)).
    const double nd = static_cast<double>(n);
    double emi = 0.0;
    for (int ai : a) {
        for (int bj : b) {
            const int lo = std::max(1, ai + bj - n);
            const int hi = std::min(ai, bj);
            for (int nij = lo; nij <= hi; ++nij) {
                const double log_weight = lf(ai) + lf(bj) + lf(n - ai) + lf(n - bj) - lf(n) -
                                          lf(nij) - lf(ai - nij) - lf(bj - nij) -
                                          lf(n - ai - bj + nij);
                emi += std::exp(log_weight) * (nij / nd) *
                       std::log(nd * nij / (static_cast<double>(ai) * static_cast<double>(bj)));
            }
        }
    }
    return emi;
}

double ami(const Partition& u, const Partition& v) {
    const double mi = mutual_information(u, v);
    const double emi = expected_mi(u, v);
    const double denom = std::max(entropy(u), entropy(v)) - emi;
    if (std::abs(denom) < 1e-12) {
        // Both partitions carry no usable information (e.g. single cluster
        // each); they agree perfectly or not at all.
        return u.labels == v.labels ? 1.0 : 0.0;
    }
    return (mi - emi) / denom;
}

MetricsReport summarize(const DistanceMatrix& distances, const Partition& predicted,
                        const Partition& reference) {
    MetricsReport report;
    report.silhouette = silhouette(distances, predicted);
    report.mi = mutual_information(predicted, reference);
    report.expected_mi = expected_mi(predicted, reference);
    report.ami = ami(predicted, reference);
    return report;
}

}  // namespace qkc
