// Command-line front end: dataset generation plus the three experiment
// drivers (silhouette sweep, sample-complexity curves, noisy-vs-ideal
// comparison). Results land in an output directory as records.csv/json,
// per-family pivots and failures.log.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qkc/dataset.hpp"
#include "qkc/experiment.hpp"

namespace {

struct CommonArgs {
    std::string input;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--input", args.input, "dataset CSV (id column + numeric features)")
        ->required();
    cmd->add_option("--config", args.config, "experiment config JSON");
    cmd->add_option("--out", args.out, "output directory")->required();
    cmd->add_option("--seed", args.seed,
                    "base seed; expands to 5 consecutive seeds unless the config sets them");
    cmd->add_option("--threads", args.threads, "worker threads for kernel evaluation")
        ->check(CLI::Range(1, 256));
}

// Config precedence: file settings win; a missing "seeds" key falls back to
// five consecutive seeds starting at --seed.
qkc::SweepConfig load_config(const CommonArgs& args) {
    qkc::SweepConfig config;
    bool file_has_seeds = false;
    if (!args.config.empty()) {
        std::ifstream in(args.config);
        if (!in) {
            throw std::runtime_error("cannot open config '" + args.config + "'");
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        config = qkc::SweepConfig::from_json_text(buffer.str());
        file_has_seeds = nlohmann::json::parse(buffer.str()).contains("seeds");
    }
    if (!file_has_seeds) {
        config.seeds.clear();
        for (std::uint64_t i = 0; i < 5; ++i) config.seeds.push_back(args.seed + i);
    }
    return config;
}

int run_experiment(const CommonArgs& args, const std::string& which) {
    const qkc::Dataset dataset = qkc::ingest_csv(args.input);
    qkc::SweepConfig config = load_config(args);
    qkc::RunOptions options;
    options.threads = args.threads;

    if (which == "noise-compare" && !config.noise) {
        config.noise = qkc::NoiseConfig{};  // representative defaults
        std::cout << "note: no noise config given; using p1=" << config.noise->p1
                  << " p2=" << config.noise->p2 << " p_readout=" << config.noise->p_readout
                  << " shots=" << config.noise->shots << "\n";
    }

    std::vector<qkc::FailureEntry> failures;
    std::vector<qkc::ExperimentRecord> records;
    if (which == "sweep") {
        records = qkc::run_sc_sweep(dataset.features, config, options, failures);
    } else if (which == "sample-complexity") {
        records = qkc::run_sample_complexity(dataset.features, config, options, failures);
    } else {
        records = qkc::run_noise_comparison(dataset.features, config, options, failures);
    }
    qkc::emit_results(records, failures, args.out);

    std::cout << which << ": " << dataset.n_samples() << " samples, " << records.size()
              << " records, " << failures.size() << " failed cells -> " << args.out << "\n";
    if (!failures.empty()) {
        std::cout << "see " << (std::filesystem::path(args.out) / "failures.log").string()
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-kernel clustering toolkit"};
    app.require_subcommand(1);

    CommonArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "silhouette sweep over families x betas x k");
    add_common(sweep, sweep_args);

    CommonArgs sample_args;
    CLI::App* sample = app.add_subcommand(
        "sample-complexity", "subset-vs-full label agreement for cells passing the sc threshold");
    add_common(sample, sample_args);

    CommonArgs noise_args;
    CLI::App* noise =
        app.add_subcommand("noise-compare", "exact vs shot-sampled noisy kernels on a subset");
    add_common(noise, noise_args);

    CLI::App* blobs = app.add_subcommand("gen-blobs", "write a synthetic Gaussian-blob dataset");
    std::string blobs_out;
    int per_cluster = 100;
    int clusters = 3;
    int dim = 4;
    double separation = 10.0;
    double spread = 1.0;
    std::uint64_t blobs_seed = 0;
    blobs->add_option("--out", blobs_out, "output directory")->required();
    blobs->add_option("--n-per-cluster", per_cluster, "points per cluster")
        ->check(CLI::PositiveNumber);
    blobs->add_option("--clusters", clusters, "number of clusters")->check(CLI::PositiveNumber);
    blobs->add_option("--dim", dim, "feature dimensions")->check(CLI::PositiveNumber);
    blobs->add_option("--separation", separation, "minimum distance between cluster centers");
    blobs->add_option("--spread", spread, "per-cluster standard deviation");
    blobs->add_option("--seed", blobs_seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (blobs->parsed()) {
            std::filesystem::create_directories(blobs_out);
            const qkc::BlobData data =
                qkc::make_blobs(per_cluster, clusters, dim, separation, spread, blobs_seed);
            const auto features_path = std::filesystem::path(blobs_out) / "features.csv";
            const auto labels_path = std::filesystem::path(blobs_out) / "labels.csv";
            qkc::save_blobs_csv(data, features_path, labels_path);
            std::cout << "gen-blobs: " << data.features.rows() << " samples, " << clusters
                      << " clusters -> " << features_path.string() << "\n";
            return 0;
        }
        if (sweep->parsed()) return run_experiment(sweep_args, "sweep");
        if (sample->parsed()) return run_experiment(sample_args, "sample-complexity");
        if (noise->parsed()) return run_experiment(noise_args, "noise-compare");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
