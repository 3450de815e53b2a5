#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qkc/feature_map.hpp"
#include "qkc/features.hpp"
#include "qkc/kernel.hpp"
#include "qkc/noise.hpp"

namespace qkc {

// Kernel families swept by the experiments: the quantum feature maps plus
// the classical RBF baseline.
enum class SweepFamily { Z, ZZLinear, ZZFull, Rbf };

const char* sweep_family_name(SweepFamily family);

// Sentinel in SweepConfig::sample_sizes meaning "use every sample".
inline constexpr int kFullDataset = -1;

struct SweepConfig {
    std::vector<SweepFamily> feature_families = {SweepFamily::Z, SweepFamily::ZZLinear,
                                                 SweepFamily::ZZFull, SweepFamily::Rbf};
    std::vector<double> betas = {0.39269908169872414, 0.78539816339744831, 1.5707963267948966,
                                 3.1415926535897932, 6.2831853071795865};
    int k_min = 2;
    int k_max = 10;
    std::vector<int> sample_sizes = {50, 100, 250, 500, 800, 1000, kFullDataset};
    double sc_threshold = 0.3;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    std::optional<NoiseConfig> noise;

    // Throws std::invalid_argument on empty/duplicate lists, k_min < 2,
    // k_max < k_min, betas outside (0, 2*pi], sample sizes below 2 (other
    // than the full-dataset sentinel), or invalid noise settings.
    void validate() const;

    // JSON object mirroring the field names above; k_range is a two-element
    // array [k_min, k_max], sample_sizes may contain the string "full", and
    // unknown keys raise std::runtime_error.
    static SweepConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// One experimental cell result. Optional fields stay empty where a metric
// does not apply (beta for RBF, ami_vs_full outside subset runs,
// ami_vs_ideal outside noise comparisons).
struct ExperimentRecord {
    std::string run_id;  // digest of the identifying fields below
    SweepFamily family = SweepFamily::Z;
    KernelKind kernel_kind = KernelKind::QuantumExact;
    std::optional<double> beta;
    int k = 0;
    int n_samples = 0;
    std::uint64_t seed = 0;
    double sc = 0.0;                      // silhouette on the kernel distance
    std::optional<double> ami_vs_full;    // subset labels vs full-data labels
    std::optional<double> ami_vs_ideal;   // noisy labels vs exact labels
    int circuit_depth = 0;                // compute-uncompute circuit; 0 for RBF
    int two_qubit_count = 0;
    std::string config_digest;
    double wall_time_ms = 0.0;  // informational; excluded from records.csv so
                                // identical runs serialize byte-identically
};

struct FailureEntry {
    std::string cell;  // "family=... beta=... k=..." locator
    std::string message;
};

// Execution knobs that are not part of the experiment definition.
struct RunOptions {
    int threads = 1;
    int reps = 2;  // feature-map repetitions
    PairPhase pair_phase = PairPhase::Product;
    double rbf_sigma = 1.0;
    int noise_subset = 100;  // samples drawn for the noise comparison
};

// Silhouette sweep: spectral clustering on the full dataset for every
// (family, beta, k) cell, one record per cell, clustered with the first
// configured seed. Feature scaling is fit once on `features`. Cells that
// throw are skipped and logged into `failures`.
std::vector<ExperimentRecord> run_sc_sweep(const FeatureMatrix& features,
                                           const SweepConfig& config, const RunOptions& options,
                                           std::vector<FailureEntry>& failures);

// Subset stability: cells whose full-data silhouette reaches
// config.sc_threshold are re-clustered on random subsets of each configured
// size (one subset per seed; the feature scaler stays frozen on the full
// data) and compared against the restriction of the full-data labels via
// ami_vs_full. A subset of full size reproduces the full-data labels, so its
// AMI is exactly 1.
std::vector<ExperimentRecord> run_sample_complexity(const FeatureMatrix& features,
                                                    const SweepConfig& config,
                                                    const RunOptions& options,
                                                    std::vector<FailureEntry>& failures);

// Noise susceptibility on a fixed random subset (options.noise_subset rows):
// per quantum family/beta, the exact Gram matrix is clustered next to a
// shot-sampled noisy Gram matrix per seed, and each pair of records carries
// the noisy-vs-ideal label agreement. Requires config.noise. The RBF family
// has no circuit to perturb and is skipped.
std::vector<ExperimentRecord> run_noise_comparison(const FeatureMatrix& features,
                                                   const SweepConfig& config,
                                                   const RunOptions& options,
                                                   std::vector<FailureEntry>& failures);

// Writes records.csv (sorted, fixed column order, %.17g floats),
// records.json (same rows plus wall_time_ms), pivot_<family>.csv (mean sc,
// k rows x beta columns) and failures.log into out_dir. Throws
// std::invalid_argument on an empty record list and std::runtime_error on
// I/O failures.
void emit_results(const std::vector<ExperimentRecord>& records,
                  const std::vector<FailureEntry>& failures,
                  const std::filesystem::path& out_dir);

// Reads a records.csv produced by emit_results (wall times come back as 0).
std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path);

}  // namespace qkc
