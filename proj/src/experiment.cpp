#include "qkc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "qkc/digest.hpp"
#include "qkc/metrics.hpp"
#include "qkc/rng.hpp"
#include "qkc/spectral.hpp"

namespace qkc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kTwoPi = 6.2831853071795864769;

// Salts separating the independent random streams derived from a user seed.
constexpr std::uint64_t kSubsetSalt = 0x73756273;  // subset draws
constexpr std::uint64_t kNoiseSubsetSalt = 0x6e6f6973;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int family_rank(SweepFamily family) { return static_cast<int>(family); }
int kind_rank(KernelKind kind) { return static_cast<int>(kind); }

FeatureFamily to_feature_family(SweepFamily family) {
    switch (family) {
        case SweepFamily::Z: return FeatureFamily::Z;
        case SweepFamily::ZZLinear: return FeatureFamily::ZZLinear;
        case SweepFamily::ZZFull: return FeatureFamily::ZZFull;
        case SweepFamily::Rbf: break;
    }
    throw std::logic_error("RBF has no feature-map family");
}

SweepFamily family_from_name(const std::string& name) {
    if (name == "Z") return SweepFamily::Z;
    if (name == "ZZLinear") return SweepFamily::ZZLinear;
    if (name == "ZZFull") return SweepFamily::ZZFull;
    if (name == "RBF") return SweepFamily::Rbf;
    throw std::runtime_error("unknown feature family '" + name + "'");
}

KernelKind kind_from_name(const std::string& name) {
    if (name == "quantum_exact") return KernelKind::QuantumExact;
    if (name == "quantum_sampled") return KernelKind::QuantumSampled;
    if (name == "rbf") return KernelKind::Rbf;
    throw std::runtime_error("unknown kernel kind '" + name + "'");
}

std::string pivot_file_token(SweepFamily family) {
    switch (family) {
        case SweepFamily::Z: return "z";
        case SweepFamily::ZZLinear: return "zz_linear";
        case SweepFamily::ZZFull: return "zz_full";
        case SweepFamily::Rbf: return "rbf";
    }
    throw std::logic_error("unreachable sweep family");
}

std::string cell_name(SweepFamily family, std::optional<double> beta, int k) {
    std::string name = "family=";
    name += sweep_family_name(family);
    if (beta) name += " beta=" + format_double(*beta);
    name += " k=" + std::to_string(k);
    return name;
}

std::string make_run_id(const ExperimentRecord& r) {
    std::string desc = sweep_family_name(r.family);
    desc += '|';
    desc += kernel_kind_name(r.kernel_kind);
    desc += '|';
    desc += r.beta ? format_double(*r.beta) : std::string("-");
    desc += '|' + std::to_string(r.k);
    desc += '|' + std::to_string(r.n_samples);
    desc += '|' + std::to_string(r.seed);
    desc += '|' + r.config_digest;
    return to_hex16(fnv1a64(desc));
}

std::string combine_digests(const std::string& a, const std::string& b) {
    return to_hex16(fnv1a64(a + "|" + b));
}

FeatureMapConfig feature_config(SweepFamily family, int n_features, double beta,
                                const RunOptions& options) {
    FeatureMapConfig config;
    config.family = to_feature_family(family);
    config.n_qubits = n_features;
    config.reps = options.reps;
    config.beta = beta;
    config.pair_phase = options.pair_phase;
    return config;
}

// Depth and two-qubit count of the kernel-evaluation circuit U^dag U;
// independent of the data point, so an all-zeros sample stands in.
CircuitStats kernel_circuit_stats(const FeatureMapConfig& config) {
    const Circuit u = build_feature_map(config, Eigen::VectorXd::Zero(config.n_qubits));
    return circuit_stats(concat(u, inverse(u)));
}

// count indices drawn without replacement from [0, n), ascending. count == n
// yields the identity regardless of seed.
std::vector<Eigen::Index> sample_indices(Eigen::Index n, Eigen::Index count,
                                         std::uint64_t seed) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    if (count >= n) return all;
    Rng rng(seed);
    for (Eigen::Index i = 0; i < count; ++i) {
        const Eigen::Index j =
            i + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n - i)));
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    all.resize(static_cast<std::size_t>(count));
    std::sort(all.begin(), all.end());
    return all;
}

FeatureMatrix take_rows(const FeatureMatrix& source, const std::vector<Eigen::Index>& idx) {
    FeatureMatrix out(static_cast<Eigen::Index>(idx.size()), source.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = source.row(idx[i]);
    }
    return out;
}

Partition restrict_partition(const Partition& full, const std::vector<Eigen::Index>& idx) {
    std::vector<int> sub;
    sub.reserve(idx.size());
    for (Eigen::Index i : idx) sub.push_back(full.labels[static_cast<std::size_t>(i)]);
    return Partition::from_labels(sub);
}

// Everything derived from one Gram matrix that the per-k loop reuses: the
// distance matrix and the eigenbasis sliced per k.
struct KernelBundle {
    KernelMatrix kernel;
    DistanceMatrix distances;
    SpectralBasis basis;
    int k_cap = 0;  // largest k the basis supports
};

KernelBundle make_bundle(KernelMatrix kernel, int k_hi) {
    KernelBundle bundle;
    bundle.k_cap = static_cast<int>(std::min<Eigen::Index>(k_hi, kernel.n()));
    const SpectralConfig defaults{};
    bundle.distances = kernel_distance(kernel);
    bundle.basis = spectral_basis(kernel, defaults, bundle.k_cap);
    bundle.kernel = std::move(kernel);
    return bundle;
}

Partition cluster_k(const KernelBundle& bundle, int k, std::uint64_t seed) {
    if (k > bundle.k_cap) {
        throw std::invalid_argument("k=" + std::to_string(k) + " exceeds the " +
                                    std::to_string(bundle.k_cap) + " usable dimensions");
    }
    const SpectralConfig defaults{};
    const Eigen::MatrixXd coords = embed_from_basis(bundle.basis, k);
    const ClusterAssignment assignment =
        kmeans(coords, k, defaults.kmeans_restarts, defaults.kmeans_max_iter, seed);
    return Partition::from_labels(assignment.labels);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

void require_two_samples(const FeatureMatrix& features, const char* what) {
    if (features.rows() < 2) {
        throw std::invalid_argument(std::string(what) + " needs at least two samples");
    }
}

// ---- JSON config helpers ----------------------------------------------

double as_number(const json& value, const std::string& context) {
    if (!value.is_number()) {
        throw std::runtime_error(context + " must be a number");
    }
    return value.get<double>();
}

int as_int(const json& value, const std::string& context) {
    if (!value.is_number_integer()) {
        throw std::runtime_error(context + " must be an integer");
    }
    return value.get<int>();
}

const json& as_array(const json& value, const std::string& context) {
    if (!value.is_array()) {
        throw std::runtime_error(context + " must be an array");
    }
    return value;
}

NoiseConfig noise_from_json(const json& value) {
    if (!value.is_object()) {
        throw std::runtime_error("noise must be an object");
    }
    NoiseConfig noise;
    for (const auto& [key, field] : value.items()) {
        if (key == "p1") {
            noise.p1 = as_number(field, "noise.p1");
        } else if (key == "p2") {
            noise.p2 = as_number(field, "noise.p2");
        } else if (key == "p_readout") {
            noise.p_readout = as_number(field, "noise.p_readout");
        } else if (key == "shots") {
            noise.shots = as_int(field, "noise.shots");
        } else {
            throw std::runtime_error("unknown config key 'noise." + key + "'");
        }
    }
    return noise;
}

}  // namespace

const char* sweep_family_name(SweepFamily family) {
    switch (family) {
        case SweepFamily::Z: return "Z";
        case SweepFamily::ZZLinear: return "ZZLinear";
        case SweepFamily::ZZFull: return "ZZFull";
        case SweepFamily::Rbf: return "RBF";
    }
    throw std::logic_error("unreachable sweep family");
}

void SweepConfig::validate() const {
    if (feature_families.empty()) {
        throw std::invalid_argument("feature_families must not be empty");
    }
    std::set<SweepFamily> family_set(feature_families.begin(), feature_families.end());
    if (family_set.size() != feature_families.size()) {
        throw std::invalid_argument("feature_families contains duplicates");
    }
    const bool any_quantum =
        std::any_of(feature_families.begin(), feature_families.end(),
                    [](SweepFamily f) { return f != SweepFamily::Rbf; });
    if (any_quantum && betas.empty()) {
        throw std::invalid_argument("betas must not be empty when a quantum family is swept");
    }
    std::set<double> beta_set(betas.begin(), betas.end());
    if (beta_set.size() != betas.size()) {
        throw std::invalid_argument("betas contains duplicates");
    }
    for (double beta : betas) {
        if (!(beta > 0.0) || beta > kTwoPi + 1e-9 || !std::isfinite(beta)) {
            throw std::invalid_argument("beta " + format_double(beta) +
                                        " outside (0, 2*pi]");
        }
    }
    if (k_min < 2) {
        throw std::invalid_argument("k_range lower bound must be >= 2, got " +
                                    std::to_string(k_min));
    }
    if (k_max < k_min) {
        throw std::invalid_argument("k_range upper bound " + std::to_string(k_max) +
                                    " below lower bound " + std::to_string(k_min));
    }
    if (sample_sizes.empty()) {
        throw std::invalid_argument("sample_sizes must not be empty");
    }
    std::set<int> size_set(sample_sizes.begin(), sample_sizes.end());
    if (size_set.size() != sample_sizes.size()) {
        throw std::invalid_argument("sample_sizes contains duplicates");
    }
    for (int size : sample_sizes) {
        if (size != kFullDataset && size < 2) {
            throw std::invalid_argument("sample size must be >= 2 or \"full\", got " +
                                        std::to_string(size));
        }
    }
    if (!std::isfinite(sc_threshold) || sc_threshold < -1.0 || sc_threshold > 1.0) {
        throw std::invalid_argument("sc_threshold must lie in [-1, 1]");
    }
    if (seeds.empty()) {
        throw std::invalid_argument("seeds must not be empty");
    }
    std::set<std::uint64_t> seed_set(seeds.begin(), seeds.end());
    if (seed_set.size() != seeds.size()) {
        throw std::invalid_argument("seeds contains duplicates");
    }
    if (noise) noise->validate();
}

SweepConfig SweepConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw std::runtime_error("config root must be a JSON object");
    }
    SweepConfig config;
    for (const auto& [key, value] : root.items()) {
        if (key == "feature_families") {
            config.feature_families.clear();
            for (const auto& entry : as_array(value, "feature_families")) {
                if (!entry.is_string()) {
                    throw std::runtime_error("feature_families entries must be strings");
                }
                config.feature_families.push_back(family_from_name(entry.get<std::string>()));
            }
        } else if (key == "betas") {
            config.betas.clear();
            for (const auto& entry : as_array(value, "betas")) {
                config.betas.push_back(as_number(entry, "betas entry"));
            }
        } else if (key == "k_range") {
            const json& range = as_array(value, "k_range");
            if (range.size() != 2) {
                throw std::runtime_error("k_range must be a [min, max] pair");
            }
            config.k_min = as_int(range[0], "k_range[0]");
            config.k_max = as_int(range[1], "k_range[1]");
        } else if (key == "sample_sizes") {
            config.sample_sizes.clear();
            for (const auto& entry : as_array(value, "sample_sizes")) {
                if (entry.is_string()) {
                    if (entry.get<std::string>() != "full") {
                        throw std::runtime_error("sample_sizes strings must be \"full\"");
                    }
                    config.sample_sizes.push_back(kFullDataset);
                } else {
                    config.sample_sizes.push_back(as_int(entry, "sample_sizes entry"));
                }
            }
        } else if (key == "sc_threshold") {
            config.sc_threshold = as_number(value, "sc_threshold");
        } else if (key == "seeds") {
            config.seeds.clear();
            for (const auto& entry : as_array(value, "seeds")) {
                if (!entry.is_number_integer() ||
                    (entry.is_number_integer() && !entry.is_number_unsigned() &&
                     entry.get<long long>() < 0)) {
                    throw std::runtime_error("seeds entries must be non-negative integers");
                }
                config.seeds.push_back(entry.get<std::uint64_t>());
            }
        } else if (key == "noise") {
            config.noise = noise_from_json(value);
        } else {
            throw std::runtime_error("unknown config key '" + key + "'");
        }
    }
    config.validate();
    return config;
}

std::string SweepConfig::to_json_text() const {
    ordered_json root;
    root["feature_families"] = json::array();
    for (SweepFamily family : feature_families) {
        root["feature_families"].push_back(sweep_family_name(family));
    }
    root["betas"] = betas;
    root["k_range"] = {k_min, k_max};
    root["sample_sizes"] = json::array();
    for (int size : sample_sizes) {
        if (size == kFullDataset) {
            root["sample_sizes"].push_back("full");
        } else {
            root["sample_sizes"].push_back(size);
        }
    }
    root["sc_threshold"] = sc_threshold;
    root["seeds"] = seeds;
    if (noise) {
        root["noise"] = {{"p1", noise->p1},
                         {"p2", noise->p2},
                         {"p_readout", noise->p_readout},
                         {"shots", noise->shots}};
    }
    return root.dump(2);
}

std::vector<ExperimentRecord> run_sc_sweep(const FeatureMatrix& features,
                                           const SweepConfig& config, const RunOptions& options,
                                           std::vector<FailureEntry>& failures) {
    config.validate();
    require_two_samples(features, "silhouette sweep");
    const FeatureScaler scaler = FeatureScaler::fit(features);
    const std::string scaler_digest = scaler.digest();
    const std::uint64_t cluster_seed = config.seeds.front();
    std::vector<ExperimentRecord> records;

    auto sweep_one = [&](SweepFamily family, std::optional<double> beta) {
        const auto shared_start = std::chrono::steady_clock::now();
        KernelMatrix kernel;
        CircuitStats stats{};
        if (family == SweepFamily::Rbf) {
            RbfConfig rbf;
            rbf.sigma = options.rbf_sigma;
            kernel = gram_rbf(scaler.apply(features, 1.0), rbf);
        } else {
            const FeatureMapConfig map_config =
                feature_config(family, static_cast<int>(features.cols()), *beta, options);
            kernel = gram_exact(map_config, scaler.apply(features, *beta), options.threads);
            stats = kernel_circuit_stats(map_config);
        }
        const std::string digest = combine_digests(kernel.config_digest, scaler_digest);
        const KernelBundle bundle = make_bundle(std::move(kernel), config.k_max);
        const double shared_ms =
            elapsed_ms(shared_start) / static_cast<double>(config.k_max - config.k_min + 1);

        for (int k = config.k_min; k <= config.k_max; ++k) {
            const auto cell_start = std::chrono::steady_clock::now();
            try {
                const Partition labels = cluster_k(bundle, k, cluster_seed);
                ExperimentRecord record;
                record.family = family;
                record.kernel_kind = bundle.kernel.kind;
                record.beta = beta;
                record.k = k;
                record.n_samples = static_cast<int>(features.rows());
                record.seed = cluster_seed;
                record.sc = silhouette(bundle.distances, labels);
                record.circuit_depth = stats.depth;
                record.two_qubit_count = stats.two_qubit_count;
                record.config_digest = digest;
                record.wall_time_ms = shared_ms + elapsed_ms(cell_start);
                record.run_id = make_run_id(record);
                records.push_back(std::move(record));
            } catch (const std::exception& e) {
                failures.push_back({cell_name(family, beta, k), e.what()});
            }
        }
    };

    for (SweepFamily family : config.feature_families) {
        if (family == SweepFamily::Rbf) {
            try {
                sweep_one(family, std::nullopt);
            } catch (const std::exception& e) {
                for (int k = config.k_min; k <= config.k_max; ++k) {
                    failures.push_back({cell_name(family, std::nullopt, k), e.what()});
                }
            }
        } else {
            for (double beta : config.betas) {
                try {
                    sweep_one(family, beta);
                } catch (const std::exception& e) {
                    for (int k = config.k_min; k <= config.k_max; ++k) {
                        failures.push_back({cell_name(family, beta, k), e.what()});
                    }
                }
            }
        }
    }
    return records;
}

std::vector<ExperimentRecord> run_sample_complexity(const FeatureMatrix& features,
                                                    const SweepConfig& config,
                                                    const RunOptions& options,
                                                    std::vector<FailureEntry>& failures) {
    config.validate();
    require_two_samples(features, "sample-complexity run");
    const Eigen::Index n_full = features.rows();
    for (int size : config.sample_sizes) {
        if (size != kFullDataset && size > n_full) {
            throw std::invalid_argument("sample size " + std::to_string(size) +
                                        " exceeds the dataset size " + std::to_string(n_full));
        }
    }
    const FeatureScaler scaler = FeatureScaler::fit(features);
    const std::string scaler_digest = scaler.digest();
    const std::uint64_t reference_seed = config.seeds.front();

    // Reference pass: full-data clustering per cell; cells below the
    // silhouette threshold drop out. Cells sharing (family, beta) are grouped
    // so every subset Gram matrix is built once per (size, seed).
    struct SelectedCell {
        int k = 0;
        double sc_full = 0.0;
        Partition full_labels;
    };
    struct CellGroup {
        SweepFamily family = SweepFamily::Z;
        std::optional<double> beta;
        CircuitStats stats{};
        std::string digest;  // kernel-config digest; subsets share it
        std::vector<SelectedCell> cells;
    };
    std::vector<CellGroup> groups;

    auto build_kernel = [&](SweepFamily family, std::optional<double> beta,
                            const FeatureMatrix& rows) {
        if (family == SweepFamily::Rbf) {
            RbfConfig rbf;
            rbf.sigma = options.rbf_sigma;
            return gram_rbf(scaler.apply(rows, 1.0), rbf);
        }
        const FeatureMapConfig map_config =
            feature_config(family, static_cast<int>(rows.cols()), *beta, options);
        return gram_exact(map_config, scaler.apply(rows, *beta), options.threads);
    };

    auto select_group = [&](SweepFamily family, std::optional<double> beta) {
        CellGroup group;
        group.family = family;
        group.beta = beta;
        if (family != SweepFamily::Rbf) {
            group.stats = kernel_circuit_stats(
                feature_config(family, static_cast<int>(features.cols()), *beta, options));
        }
        const KernelBundle bundle = make_bundle(build_kernel(family, beta, features),
                                                config.k_max);
        group.digest = combine_digests(bundle.kernel.config_digest, scaler_digest);
        for (int k = config.k_min; k <= config.k_max; ++k) {
            try {
                const Partition labels = cluster_k(bundle, k, reference_seed);
                const double sc = silhouette(bundle.distances, labels);
                if (sc >= config.sc_threshold) {
                    group.cells.push_back({k, sc, labels});
                }
            } catch (const std::exception& e) {
                failures.push_back({cell_name(family, beta, k), e.what()});
            }
        }
        if (!group.cells.empty()) groups.push_back(std::move(group));
    };

    for (SweepFamily family : config.feature_families) {
        if (family == SweepFamily::Rbf) {
            try {
                select_group(family, std::nullopt);
            } catch (const std::exception& e) {
                for (int k = config.k_min; k <= config.k_max; ++k) {
                    failures.push_back({cell_name(family, std::nullopt, k), e.what()});
                }
            }
        } else {
            for (double beta : config.betas) {
                try {
                    select_group(family, beta);
                } catch (const std::exception& e) {
                    for (int k = config.k_min; k <= config.k_max; ++k) {
                        failures.push_back({cell_name(family, beta, k), e.what()});
                    }
                }
            }
        }
    }

    std::vector<ExperimentRecord> records;
    auto make_subset_record = [&](const CellGroup& group, const SelectedCell& cell,
                                  int n_samples, std::uint64_t seed, double sc, double agreement,
                                  const std::string& digest, double wall_ms) {
        ExperimentRecord record;
        record.family = group.family;
        record.kernel_kind =
            group.family == SweepFamily::Rbf ? KernelKind::Rbf : KernelKind::QuantumExact;
        record.beta = group.beta;
        record.k = cell.k;
        record.n_samples = n_samples;
        record.seed = seed;
        record.sc = sc;
        record.ami_vs_full = agreement;
        record.circuit_depth = group.stats.depth;
        record.two_qubit_count = group.stats.two_qubit_count;
        record.config_digest = digest;
        record.wall_time_ms = wall_ms;
        record.run_id = make_run_id(record);
        records.push_back(std::move(record));
    };

    for (const CellGroup& group : groups) {
        int group_k_max = 0;
        for (const SelectedCell& cell : group.cells) group_k_max = std::max(group_k_max, cell.k);

        for (int size : config.sample_sizes) {
            const Eigen::Index subset_n = size == kFullDataset ? n_full : size;
            if (subset_n == n_full) {
                // The subset equals the dataset for every seed: the reference
                // labels reproduce exactly, so reuse them directly.
                for (std::uint64_t seed : config.seeds) {
                    for (const SelectedCell& cell : group.cells) {
                        const auto start = std::chrono::steady_clock::now();
                        const double agreement = ami(cell.full_labels, cell.full_labels);
                        make_subset_record(group, cell, static_cast<int>(n_full), seed,
                                           cell.sc_full, agreement, group.digest,
                                           elapsed_ms(start));
                    }
                }
                continue;
            }

            for (std::uint64_t seed : config.seeds) {
                const auto shared_start = std::chrono::steady_clock::now();
                std::vector<Eigen::Index> idx;
                std::optional<KernelBundle> bundle;
                try {
                    idx = sample_indices(n_full, subset_n,
                                         mix_seed(seed, kSubsetSalt,
                                                  static_cast<std::uint64_t>(subset_n)));
                    const FeatureMatrix subset = take_rows(features, idx);
                    bundle = make_bundle(build_kernel(group.family, group.beta, subset),
                                         group_k_max);
                } catch (const std::exception& e) {
                    for (const SelectedCell& cell : group.cells) {
                        failures.push_back({cell_name(group.family, group.beta, cell.k) +
                                                " n=" + std::to_string(subset_n) +
                                                " seed=" + std::to_string(seed),
                                            e.what()});
                    }
                    continue;
                }
                const double shared_ms =
                    elapsed_ms(shared_start) / static_cast<double>(group.cells.size());

                for (const SelectedCell& cell : group.cells) {
                    const auto cell_start = std::chrono::steady_clock::now();
                    try {
                        const Partition subset_labels = cluster_k(*bundle, cell.k,
                                                                  reference_seed);
                        const Partition reference = restrict_partition(cell.full_labels, idx);
                        const double sc = silhouette(bundle->distances, subset_labels);
                        const double agreement = ami(subset_labels, reference);
                        make_subset_record(group, cell, static_cast<int>(subset_n), seed, sc,
                                           agreement, group.digest,
                                           shared_ms + elapsed_ms(cell_start));
                    } catch (const std::exception& e) {
                        failures.push_back({cell_name(group.family, group.beta, cell.k) +
                                                " n=" + std::to_string(subset_n) +
                                                " seed=" + std::to_string(seed),
                                            e.what()});
                    }
                }
            }
        }
    }
    return records;
}

std::vector<ExperimentRecord> run_noise_comparison(const FeatureMatrix& features,
                                                   const SweepConfig& config,
                                                   const RunOptions& options,
                                                   std::vector<FailureEntry>& failures) {
    config.validate();
    if (!config.noise) {
        throw std::invalid_argument("noise comparison requires a noise configuration");
    }
    require_two_samples(features, "noise comparison");
    if (options.noise_subset < 2) {
        throw std::invalid_argument("noise comparison subset must hold at least two samples");
    }
    const NoiseConfig noise = *config.noise;
    const Eigen::Index subset_n =
        std::min<Eigen::Index>(options.noise_subset, features.rows());
    const std::vector<Eigen::Index> idx = sample_indices(
        features.rows(), subset_n, mix_seed(config.seeds.front(), kNoiseSubsetSalt));
    const FeatureScaler scaler = FeatureScaler::fit(features);
    const std::string scaler_digest = scaler.digest();
    const FeatureMatrix subset = take_rows(features, idx);

    std::vector<ExperimentRecord> records;
    auto compare_one = [&](SweepFamily family, double beta) {
        const FeatureMapConfig map_config =
            feature_config(family, static_cast<int>(subset.cols()), beta, options);
        const FeatureMatrix scaled = scaler.apply(subset, beta);
        const CircuitStats stats = kernel_circuit_stats(map_config);
        KernelMatrix exact = gram_exact(map_config, scaled, options.threads);
        const std::string exact_digest = combine_digests(exact.config_digest, scaler_digest);
        const KernelBundle exact_bundle = make_bundle(std::move(exact), config.k_max);

        for (std::uint64_t seed : config.seeds) {
            const auto shared_start = std::chrono::steady_clock::now();
            KernelMatrix sampled = gram_sampled(map_config, scaled, noise, seed,
                                                options.threads);
            const std::string sampled_digest =
                combine_digests(sampled.config_digest, scaler_digest);
            const KernelBundle sampled_bundle = make_bundle(std::move(sampled), config.k_max);
            const double shared_ms =
                elapsed_ms(shared_start) /
                static_cast<double>(config.k_max - config.k_min + 1);

            for (int k = config.k_min; k <= config.k_max; ++k) {
                const auto cell_start = std::chrono::steady_clock::now();
                try {
                    const Partition ideal = cluster_k(exact_bundle, k, seed);
                    const Partition noisy = cluster_k(sampled_bundle, k, seed);
                    const double agreement = ami(noisy, ideal);
                    const double cell_ms = shared_ms + elapsed_ms(cell_start);

                    ExperimentRecord ideal_record;
                    ideal_record.family = family;
                    ideal_record.kernel_kind = KernelKind::QuantumExact;
                    ideal_record.beta = beta;
                    ideal_record.k = k;
                    ideal_record.n_samples = static_cast<int>(subset_n);
                    ideal_record.seed = seed;
                    ideal_record.sc = silhouette(exact_bundle.distances, ideal);
                    ideal_record.circuit_depth = stats.depth;
                    ideal_record.two_qubit_count = stats.two_qubit_count;
                    ideal_record.config_digest = exact_digest;
                    ideal_record.wall_time_ms = cell_ms;
                    ideal_record.run_id = make_run_id(ideal_record);

                    ExperimentRecord noisy_record = ideal_record;
                    noisy_record.kernel_kind = KernelKind::QuantumSampled;
                    noisy_record.sc = silhouette(sampled_bundle.distances, noisy);
                    noisy_record.ami_vs_ideal = agreement;
                    noisy_record.config_digest = sampled_digest;
                    noisy_record.run_id = make_run_id(noisy_record);

                    records.push_back(std::move(ideal_record));
                    records.push_back(std::move(noisy_record));
                } catch (const std::exception& e) {
                    failures.push_back({cell_name(family, beta, k) +
                                            " seed=" + std::to_string(seed),
                                        e.what()});
                }
            }
        }
    };

    for (SweepFamily family : config.feature_families) {
        if (family == SweepFamily::Rbf) continue;  // no circuit to perturb
        for (double beta : config.betas) {
            try {
                compare_one(family, beta);
            } catch (const std::exception& e) {
                for (int k = config.k_min; k <= config.k_max; ++k) {
                    failures.push_back({cell_name(family, beta, k), e.what()});
                }
            }
        }
    }
    return records;
}

void emit_results(const std::vector<ExperimentRecord>& records,
                  const std::vector<FailureEntry>& failures,
                  const std::filesystem::path& out_dir) {
    if (records.empty()) {
        throw std::invalid_argument("no records to emit");
    }
    std::filesystem::create_directories(out_dir);

    std::vector<ExperimentRecord> rows = records;
    std::sort(rows.begin(), rows.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
        const auto key = [](const ExperimentRecord& r) {
            return std::make_tuple(family_rank(r.family), r.beta.value_or(-1.0), r.k,
                                   r.n_samples, r.seed, kind_rank(r.kernel_kind), r.run_id);
        };
        return key(a) < key(b);
    });

    // records.csv: stable column set, %.17g floats, optionals left empty.
    {
        std::ofstream csv(out_dir / "records.csv", std::ios::trunc);
        if (!csv) {
            throw std::runtime_error("cannot write " + (out_dir / "records.csv").string());
        }
        csv << "run_id,family,kernel_kind,beta,k,n_samples,seed,sc,ami_vs_full,ami_vs_ideal,"
               "circuit_depth,two_qubit_count,config_digest\n";
        for (const ExperimentRecord& r : rows) {
            csv << r.run_id << ',' << sweep_family_name(r.family) << ','
                << kernel_kind_name(r.kernel_kind) << ','
                << (r.beta ? format_double(*r.beta) : "") << ',' << r.k << ',' << r.n_samples
                << ',' << r.seed << ',' << format_double(r.sc) << ','
                << (r.ami_vs_full ? format_double(*r.ami_vs_full) : "") << ','
                << (r.ami_vs_ideal ? format_double(*r.ami_vs_ideal) : "") << ','
                << r.circuit_depth << ',' << r.two_qubit_count << ',' << r.config_digest
                << '\n';
        }
        if (!csv) {
            throw std::runtime_error("failed writing " + (out_dir / "records.csv").string());
        }
    }

    // records.json: same rows plus the informational wall time.
    {
        ordered_json array = ordered_json::array();
        for (const ExperimentRecord& r : rows) {
            ordered_json obj;
            obj["run_id"] = r.run_id;
            obj["family"] = sweep_family_name(r.family);
            obj["kernel_kind"] = kernel_kind_name(r.kernel_kind);
            if (r.beta) {
                obj["beta"] = *r.beta;
            } else {
                obj["beta"] = nullptr;
            }
            obj["k"] = r.k;
            obj["n_samples"] = r.n_samples;
            obj["seed"] = r.seed;
            obj["sc"] = r.sc;
            if (r.ami_vs_full) {
                obj["ami_vs_full"] = *r.ami_vs_full;
            } else {
                obj["ami_vs_full"] = nullptr;
            }
            if (r.ami_vs_ideal) {
                obj["ami_vs_ideal"] = *r.ami_vs_ideal;
            } else {
                obj["ami_vs_ideal"] = nullptr;
            }
            obj["circuit_depth"] = r.circuit_depth;
            obj["two_qubit_count"] = r.two_qubit_count;
            obj["config_digest"] = r.config_digest;
            obj["wall_time_ms"] = r.wall_time_ms;
            array.push_back(std::move(obj));
        }
        std::ofstream out(out_dir / "records.json", std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + (out_dir / "records.json").string());
        }
        out << array.dump(2) << '\n';
        if (!out) {
            throw std::runtime_error("failed writing " + (out_dir / "records.json").string());
        }
    }

    // One pivot per family: mean silhouette, k rows x beta columns.
    for (int rank = 0; rank <= family_rank(SweepFamily::Rbf); ++rank) {
        const SweepFamily family = static_cast<SweepFamily>(rank);
        std::set<int> ks;
        std::set<double> beta_values;
        bool any = false;
        for (const ExperimentRecord& r : rows) {
            if (r.family != family) continue;
            any = true;
            ks.insert(r.k);
            if (r.beta) beta_values.insert(*r.beta);
        }
        if (!any) continue;

        const std::filesystem::path path =
            out_dir / ("pivot_" + pivot_file_token(family) + ".csv");
        std::ofstream out(path, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out << 'k';
        if (beta_values.empty()) {
            out << ",value";
        } else {
            for (double beta : beta_values) {
                char label[40];
                std::snprintf(label, sizeof(label), ",beta=%.9g", beta);
                out << label;
            }
        }
        out << '\n';
        for (int k : ks) {
            out << k;
            auto mean_cell = [&](std::optional<double> beta) {
                double total = 0.0;
                int count = 0;
                for (const ExperimentRecord& r : rows) {
                    if (r.family != family || r.k != k) continue;
                    if (beta && (!r.beta || *r.beta != *beta)) continue;
                    total += r.sc;
                    ++count;
                }
                out << ',';
                if (count > 0) out << format_double(total / count);
            };
            if (beta_values.empty()) {
                mean_cell(std::nullopt);
            } else {
                for (double beta : beta_values) mean_cell(beta);
            }
            out << '\n';
        }
        if (!out) {
            throw std::runtime_error("failed writing " + path.string());
        }
    }

    // failures.log always exists so downstream tooling can rely on it.
    {
        std::ofstream out(out_dir / "failures.log", std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + (out_dir / "failures.log").string());
        }
        for (const FailureEntry& failure : failures) {
            out << failure.cell << ": " << failure.message << '\n';
        }
        if (!out) {
            throw std::runtime_error("failed writing " + (out_dir / "failures.log").string());
        }
    }
}

std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("'" + path.string() + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expected =
        "run_id,family,kernel_kind,beta,k,n_samples,seed,sc,ami_vs_full,ami_vs_ideal,"
        "circuit_depth,two_qubit_count,config_digest";
    if (line != expected) {
        throw std::runtime_error("'" + path.string() + "' has an unexpected header");
    }

    std::vector<ExperimentRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(field);
                field.clear();
            } else {
                field.push_back(c);
            }
        }
        fields.push_back(field);
        if (fields.size() != 13) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected 13 fields");
        }
        auto parse_double = [&](const std::string& token) {
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (token.empty() || end != token.c_str() + token.size()) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": bad number '" + token + "'");
            }
            return v;
        };
        ExperimentRecord r;
        r.run_id = fields[0];
        r.family = family_from_name(fields[1]);
        r.kernel_kind = kind_from_name(fields[2]);
        if (!fields[3].empty()) r.beta = parse_double(fields[3]);
        r.k = static_cast<int>(parse_double(fields[4]));
        r.n_samples = static_cast<int>(parse_double(fields[5]));
        r.seed = static_cast<std::uint64_t>(std::strtoull(fields[6].c_str(), nullptr, 10));
        r.sc = parse_double(fields[7]);
        if (!fields[8].empty()) r.ami_vs_full = parse_double(fields[8]);
        if (!fields[9].empty()) r.ami_vs_ideal = parse_double(fields[9]);
        r.circuit_depth = static_cast<int>(parse_double(fields[10]));
        r.two_qubit_count = static_cast<int>(parse_double(fields[11]));
        r.config_digest = fields[12];
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace qkc
