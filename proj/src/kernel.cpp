#include "qkc/kernel.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkc/digest.hpp"
#include "qkc/parallel.hpp"
#include "qkc/rng.hpp"
#include "qkc/statevector.hpp"

namespace qkc {

namespace {

// "QKGRAM01" read as a little-endian u64.
constexpr std::uint64_t kMagic = 0x31304D4152474B51ULL;
constexpr std::uint64_t kVersion = 1;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string quantum_digest(const char* mode, const FeatureMapConfig& config) {
    std::string desc = mode;
    desc += "|family=";
    desc += family_name(config.family);
    desc += "|n=" + std::to_string(config.n_qubits);
    desc += "|reps=" + std::to_string(config.reps);
    desc += "|beta=" + format_double(config.beta);
    desc += "|pair=";
    desc += pair_phase_name(config.pair_phase);
    return desc;
}

// All unordered pairs (i, j), i < j, as a flat list for parallel dispatch.
std::vector<std::pair<Eigen::Index, Eigen::Index>> upper_pairs(Eigen::Index n) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
}

void check_samples(const FeatureMatrix& features) {
    if (features.rows() < 1 || features.cols() < 1) {
        throw std::invalid_argument("gram needs a non-empty feature matrix");
    }
    if (!features.allFinite()) {
        throw std::invalid_argument("feature matrix contains non-finite entries");
    }
}

}  // namespace

const char* kernel_kind_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::QuantumExact: return "quantum_exact";
        case KernelKind::QuantumSampled: return "quantum_sampled";
        case KernelKind::Rbf: return "rbf";
    }
    throw std::logic_error("unreachable kernel kind");
}

KernelMatrix gram_exact(const FeatureMapConfig& config, const FeatureMatrix& scaled,
                        int n_threads) {
    config.validate();
    check_samples(scaled);
    const Eigen::Index n = scaled.rows();

    std::vector<Statevector> states(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), n_threads, [&](std::size_t i) {
        states[i] = encode(config, scaled.row(static_cast<Eigen::Index>(i)).transpose());
    });

    KernelMatrix kernel;
    kernel.kind = KernelKind::QuantumExact;
    kernel.values = Eigen::MatrixXd::Ones(n, n);
    const auto pairs = upper_pairs(n);
    parallel_for(pairs.size(), n_threads, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const double v =
            fidelity(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]);
        kernel.values(i, j) = v;
        kernel.values(j, i) = v;
    });
    kernel.config_digest = to_hex16(fnv1a64(quantum_digest("exact", config)));
    return kernel;
}

KernelMatrix gram_sampled(const FeatureMapConfig& config, const FeatureMatrix& scaled,
                          const NoiseConfig& noise, std::uint64_t seed, int n_threads) {
    config.validate();
    noise.validate();
    check_samples(scaled);
    const Eigen::Index n = scaled.rows();

    // Forward circuit per sample plus its adjoint; pair circuits are composed
    // from these instead of being rebuilt.
    std::vector<Circuit> forward(static_cast<std::size_t>(n));
    std::vector<Circuit> adjoint(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), n_threads, [&](std::size_t i) {
        forward[i] =
            build_feature_map(config, scaled.row(static_cast<Eigen::Index>(i)).transpose());
        adjoint[i] = inverse(forward[i]);
    });

    KernelMatrix kernel;
    kernel.kind = KernelKind::QuantumSampled;
    kernel.values = Eigen::MatrixXd::Ones(n, n);
    const auto pairs = upper_pairs(n);
    parallel_for(pairs.size(), n_threads, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const Circuit compute_uncompute =
            concat(forward[static_cast<std::size_t>(j)], adjoint[static_cast<std::size_t>(i)]);
        const double v =
            sample_fidelity(compute_uncompute, noise,
                            mix_seed(seed, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(j)));
        kernel.values(i, j) = v;
        kernel.values(j, i) = v;
    });

    std::string desc = quantum_digest("sampled", config);
    desc += "|p1=" + format_double(noise.p1);
    desc += "|p2=" + format_double(noise.p2);
    desc += "|pread=" + format_double(noise.p_readout);
    desc += "|shots=" + std::to_string(noise.shots);
    kernel.config_digest = to_hex16(fnv1a64(desc));
    return kernel;
}

KernelMatrix gram_rbf(const FeatureMatrix& features, const RbfConfig& config) {
    if (!(config.sigma > 0.0)) {
        throw std::invalid_argument("rbf sigma must be positive");
    }
    check_samples(features);
    const Eigen::Index n = features.rows();

    KernelMatrix kernel;
    kernel.kind = KernelKind::Rbf;
    kernel.values = Eigen::MatrixXd::Ones(n, n);
    const double scale = -1.0 / (2.0 * config.sigma * config.sigma);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (features.row(i) - features.row(j)).squaredNorm();
            const double arg = config.squared_distance ? d2 : std::sqrt(d2);
            const double v = std::exp(scale * arg);
            kernel.values(i, j) = v;
            kernel.values(j, i) = v;
        }
    }

    std::string desc = "rbf|sigma=" + format_double(config.sigma);
    desc += config.squared_distance ? "|dist=squared" : "|dist=linear";
    kernel.config_digest = to_hex16(fnv1a64(desc));
    return kernel;
}

void save_kernel(const KernelMatrix& kernel, const std::filesystem::path& path) {
    std::uint64_t digest_bits = 0;
    if (!from_hex16(kernel.config_digest, digest_bits)) {
        throw std::invalid_argument("kernel config_digest must be 16 hex chars, got '" +
                                    kernel.config_digest + "'");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    const std::uint64_t header[8] = {kMagic,
                                     kVersion,
                                     static_cast<std::uint64_t>(kernel.n()),
                                     static_cast<std::uint64_t>(kernel.kind),
                                     digest_bits,
                                     0,
                                     0,
                                     0};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    std::vector<double> row(static_cast<std::size_t>(kernel.n()));
    for (Eigen::Index i = 0; i < kernel.n(); ++i) {
        for (Eigen::Index j = 0; j < kernel.n(); ++j) {
            row[static_cast<std::size_t>(j)] = kernel.values(i, j);
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) {
        throw std::runtime_error("failed writing kernel to '" + path.string() + "'");
    }
}

KernelMatrix load_kernel(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    }
    std::uint64_t header[8] = {};
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || in.gcount() != sizeof(header)) {
        throw std::runtime_error("'" + path.string() + "' is too short for a kernel header");
    }
    if (header[0] != kMagic) {
        throw std::runtime_error("'" + path.string() + "' is not a kernel matrix file");
    }
    if (header[1] != kVersion) {
        throw std::runtime_error("unsupported kernel file version " + std::to_string(header[1]));
    }
    const std::uint64_t n = header[2];
    if (n < 1 || n > 1000000) {
        throw std::runtime_error("kernel header has implausible size " + std::to_string(n));
    }
    if (header[3] > static_cast<std::uint64_t>(KernelKind::Rbf)) {
        throw std::runtime_error("kernel header has unknown kind " + std::to_string(header[3]));
    }

    KernelMatrix kernel;
    kernel.kind = static_cast<KernelKind>(header[3]);
    kernel.config_digest = to_hex16(header[4]);
    kernel.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> row(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in || in.gcount() != static_cast<std::streamsize>(row.size() * sizeof(double))) {
            throw std::runtime_error("kernel payload in '" + path.string() +
                                     "' truncated at row " + std::to_string(i));
        }
        for (std::uint64_t j = 0; j < n; ++j) {
            kernel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                row[static_cast<std::size_t>(j)];
        }
    }
    return kernel;
}

void save_kernel_csv(const KernelMatrix& kernel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << "# kind=" << kernel_kind_name(kernel.kind) << " n=" << kernel.n()
        << " digest=" << kernel.config_digest << "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < kernel.n(); ++i) {
        for (Eigen::Index j = 0; j < kernel.n(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", kernel.values(i, j));
            if (j > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("failed writing kernel CSV to '" + path.string() + "'");
    }
}

}  // namespace qkc
