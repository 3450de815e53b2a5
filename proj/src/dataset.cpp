#include "qkc/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "qkc/rng.hpp"

namespace qkc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    // Trim surrounding spaces/tabs per field.
    for (auto& f : fields) {
        const auto begin = f.find_first_not_of(" \t");
        if (begin == std::string::npos) {
            f.clear();
            continue;
        }
        const auto end = f.find_last_not_of(" \t");
        f = f.substr(begin, end - begin + 1);
    }
    return fields;
}

}  // namespace

Dataset ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("dataset '" + path.string() + "' is empty");
    }
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2) {
        throw std::runtime_error("dataset header needs an id column plus at least one feature");
    }

    Dataset data;
    data.feature_names.assign(header.begin() + 1, header.end());
    const std::size_t n_features = data.feature_names.size();

    std::vector<std::vector<double>> rows;
    std::unordered_set<std::string> seen_ids;
    std::size_t line_no = 1;  // header was line 1
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;  // ignore blank lines
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        const std::string& id = fields[0];
        if (id.empty()) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": empty sample id");
        }
        if (!seen_ids.insert(id).second) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": duplicate sample id '" +
                                     id + "'");
        }
        data.ids.push_back(id);
        std::vector<double> values(n_features);
        for (std::size_t c = 0; c < n_features; ++c) {
            const std::string& token = fields[c + 1];
            const char* begin = token.c_str();
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (token.empty() || end != begin + token.size()) {
                throw std::runtime_error("line " + std::to_string(line_no) + ", column '" +
                                         data.feature_names[c] + "': not numeric: '" + token +
                                         "'");
            }
            if (!std::isfinite(v)) {
                throw std::runtime_error("line " + std::to_string(line_no) + ", column '" +
                                         data.feature_names[c] + "': non-finite value");
            }
            values[c] = v;
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw std::runtime_error("dataset '" + path.string() + "' has a header but no rows");
    }

    data.features.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(n_features));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < n_features; ++c) {
            data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return data;
}

BlobData make_blobs(int per_cluster, int clusters, int dim, double separation, double spread,
                    std::uint64_t seed) {
    if (per_cluster < 1 || clusters < 1 || dim < 1) {
        throw std::invalid_argument("make_blobs needs per_cluster, clusters and dim >= 1");
    }
    if (!(separation > 0.0) || !(spread > 0.0)) {
        throw std::invalid_argument("make_blobs needs positive separation and spread");
    }

    Rng rng(seed);
    // Rejection-sample centers inside a box sized for the requested count;
    // the box grows if a draw keeps colliding.
    double box = separation * (std::ceil(std::pow(static_cast<double>(clusters),
                                                  1.0 / static_cast<double>(dim))) +
                               1.0);
    Eigen::MatrixXd centers(clusters, dim);
    for (int attempt = 0;; ++attempt) {
        for (int c = 0; c < clusters; ++c) {
            for (int d = 0; d < dim; ++d) centers(c, d) = rng.uniform() * box;
        }
        double min_dist = std::numeric_limits<double>::infinity();
        for (int a = 0; a < clusters; ++a) {
            for (int b = a + 1; b < clusters; ++b) {
                min_dist = std::min(min_dist, (centers.row(a) - centers.row(b)).norm());
            }
        }
        if (clusters == 1 || min_dist >= separation) break;
        if (attempt > 0 && attempt % 64 == 0) box *= 1.5;
    }

    BlobData blobs;
    blobs.centers = centers;
    blobs.features.resize(static_cast<Eigen::Index>(per_cluster) * clusters, dim);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(per_cluster) * static_cast<std::size_t>(clusters));
    Eigen::Index row = 0;
    for (int c = 0; c < clusters; ++c) {
        for (int p = 0; p < per_cluster; ++p, ++row) {
            for (int d = 0; d < dim; ++d) {
                blobs.features(row, d) = centers(c, d) + spread * rng.normal();
            }
            labels.push_back(c);
        }
    }
    blobs.labels = Partition::from_labels(labels);
    return blobs;
}

void save_blobs_csv(const BlobData& blobs, const std::filesystem::path& features_path,
                    const std::filesystem::path& labels_path) {
    std::ofstream features(features_path, std::ios::trunc);
    if (!features) {
        throw std::runtime_error("cannot open '" + features_path.string() + "' for writing");
    }
    features << "id";
    for (Eigen::Index c = 0; c < blobs.features.cols(); ++c) features << ",f" << c;
    features << '\n';
    char buf[48];
    for (Eigen::Index r = 0; r < blobs.features.rows(); ++r) {
        std::snprintf(buf, sizeof(buf), "s%05lld", static_cast<long long>(r + 1));
        features << buf;
        for (Eigen::Index c = 0; c < blobs.features.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", blobs.features(r, c));
            features << ',' << buf;
        }
        features << '\n';
    }
    if (!features) {
        throw std::runtime_error("failed writing '" + features_path.string() + "'");
    }

    std::ofstream labels(labels_path, std::ios::trunc);
    if (!labels) {
        throw std::runtime_error("cannot open '" + labels_path.string() + "' for writing");
    }
    labels << "id,label\n";
    for (std::size_t r = 0; r < blobs.labels.labels.size(); ++r) {
        std::snprintf(buf, sizeof(buf), "s%05lld", static_cast<long long>(r + 1));
        labels << buf << ',' << blobs.labels.labels[r] << '\n';
    }
    if (!labels) {
        throw std::runtime_error("failed writing '" + labels_path.string() + "'");
    }
}

}  // namespace qkc
