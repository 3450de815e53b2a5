#include "qkc/features.hpp"

#include <cstdio>
#include <stdexcept>

#include "qkc/digest.hpp"

namespace qkc {

FeatureScaler FeatureScaler::fit(const FeatureMatrix& raw) {
    if (raw.rows() < 1 || raw.cols() < 1) {
        throw std::invalid_argument("scaler needs a non-empty feature matrix");
    }
    if (!raw.allFinite()) {
        throw std::invalid_argument("feature matrix contains non-finite entries");
    }
    FeatureScaler scaler;
    scaler.col_min_ = raw.colwise().minCoeff();
    scaler.col_max_ = raw.colwise().maxCoeff();
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        if (scaler.col_max_(c) == scaler.col_min_(c)) {
            scaler.constant_columns_.push_back(static_cast<int>(c));
        }
    }
    return scaler;
}

FeatureMatrix FeatureScaler::apply(const FeatureMatrix& raw, double bandwidth) const {
    if (bandwidth <= 0.0) {
        throw std::invalid_argument("bandwidth must be positive");
    }
    if (raw.cols() != col_min_.size()) {
        throw std::invalid_argument("scaler fitted on " + std::to_string(col_min_.size()) +
                                    " features, got " + std::to_string(raw.cols()));
    }
    if (!raw.allFinite()) {
        throw std::invalid_argument("feature matrix contains non-finite entries");
    }
    FeatureMatrix out(raw.rows(), raw.cols());
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        const double lo = col_min_(c);
        const double span = col_max_(c) - lo;
        if (span == 0.0) {
            out.col(c).setZero();
        } else {
            out.col(c) = (raw.col(c).array() - lo) * (bandwidth / span);
        }
    }
    return out;
}

std::string FeatureScaler::digest() const {
    std::string desc = "scaler";
    char buf[64];
    for (Eigen::Index c = 0; c < col_min_.size(); ++c) {
        std::snprintf(buf, sizeof(buf), "|%.17g:%.17g", col_min_(c), col_max_(c));
        desc += buf;
    }
    return to_hex16(fnv1a64(desc));
}

}  // namespace qkc
