#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkc/dataset.hpp"
#include "qkc/experiment.hpp"

using namespace qkc;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_text(const fs::path& dir, const char* name, const std::string& text) {
    const fs::path path = dir / name;
    std::ofstream file(path, std::ios::binary);
    file << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream file(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

FeatureMatrix uniform_features(int rows, int cols, unsigned seed) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    FeatureMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = dist(engine);
    }
    return m;
}

bool is_hex16(const std::string& text) {
    if (text.size() != 16) return false;
    for (char ch : text) {
        const bool ok = (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f');
        if (!ok) return false;
    }
    return true;
}

void check_records_equal(const std::vector<ExperimentRecord>& actual,
                         const std::vector<ExperimentRecord>& expected, bool expect_zero_wall) {
    REQUIRE(actual.size() == expected.size());
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const ExperimentRecord& a = actual[i];
        const ExperimentRecord& e = expected[i];
        CHECK(a.run_id == e.run_id);
        CHECK(a.family == e.family);
        CHECK(a.kernel_kind == e.kernel_kind);
        CHECK(a.beta.has_value() == e.beta.has_value());
        if (a.beta && e.beta) CHECK(*a.beta == *e.beta);
        CHECK(a.k == e.k);
        CHECK(a.n_samples == e.n_samples);
        CHECK(a.seed == e.seed);
        CHECK(a.sc == e.sc);
        CHECK(a.ami_vs_full.has_value() == e.ami_vs_full.has_value());
        if (a.ami_vs_full && e.ami_vs_full) CHECK(*a.ami_vs_full == *e.ami_vs_full);
        CHECK(a.ami_vs_ideal.has_value() == e.ami_vs_ideal.has_value());
        if (a.ami_vs_ideal && e.ami_vs_ideal) CHECK(*a.ami_vs_ideal == *e.ami_vs_ideal);
        CHECK(a.circuit_depth == e.circuit_depth);
        CHECK(a.two_qubit_count == e.two_qubit_count);
        CHECK(a.config_digest == e.config_digest);
        if (expect_zero_wall) CHECK(a.wall_time_ms == 0.0);
    }
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("csv ingest accepts headers, padding and blank lines") {
    const fs::path dir = fresh_dir("qkc_ingest_ok");
    const fs::path path = write_text(dir, "data.csv",
                                     "id, f0 ,f1\r\n"
                                     "a1,0.5,-2\r\n"
                                     "\n"
                                     " a2 ,1.25e-1, 3 \n");
    const Dataset data = ingest_csv(path);
    REQUIRE(data.n_samples() == 2);
    CHECK(data.ids == std::vector<std::string>{"a1", "a2"});
    CHECK(data.feature_names == std::vector<std::string>{"f0", "f1"});
    CHECK(data.features(0, 0) == 0.5);
    CHECK(data.features(0, 1) == -2.0);
    CHECK(data.features(1, 0) == 0.125);
    CHECK(data.features(1, 1) == 3.0);
    fs::remove_all(dir);
}

TEST_CASE("csv ingest reports the offending line and column") {
    const fs::path dir = fresh_dir("qkc_ingest_bad");
    const auto expect_error = [&](const char* name, const std::string& text,
                                  const std::string& needle) {
        const fs::path path = write_text(dir, name, text);
        try {
            ingest_csv(path);
            FAIL_CHECK("expected a parse error containing '" << needle << "'");
        } catch (const std::runtime_error& error) {
            const std::string what = error.what();
            CHECK_MESSAGE(what.find(needle) != std::string::npos,
                          "message was: " << what);
        }
    };
    expect_error("ragged.csv", "id,f0,f1\na,1,2\nb,3\n", "line 3");
    expect_error("ragged.csv", "id,f0,f1\na,1,2\nb,3\n", "expected 3 fields, got 2");
    expect_error("dup.csv", "id,f0\na,1\na,2\n", "duplicate sample id 'a'");
    expect_error("alpha.csv", "id,f0\na,1\nb,oops\n", "column 'f0'");
    expect_error("alpha.csv", "id,f0\na,1\nb,oops\n", "not numeric: 'oops'");
    expect_error("nonfinite.csv", "id,f0\na,nan\n", "column 'f0'");
    expect_error("noid.csv", "id,f0\n,1\n", "line 2");
    expect_error("headeronly.csv", "id,f0\n", "no rows");
    expect_error("narrow.csv", "id\na\n", "at least one feature");
    CHECK_THROWS_AS(ingest_csv(dir / "does_not_exist.csv"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("generated blobs have the promised structure") {
    const BlobData blobs = make_blobs(25, 4, 3, 6.0, 0.5, 99);
    REQUIRE(blobs.features.rows() == 100);
    REQUIRE(blobs.features.cols() == 3);
    REQUIRE(blobs.labels.n() == 100);
    CHECK(blobs.labels.n_clusters == 4);
    CHECK(blobs.labels.sizes() == std::vector<int>{25, 25, 25, 25});
    for (int i = 0; i < 100; ++i) CHECK(blobs.labels.labels[i] == i / 25);
    REQUIRE(blobs.centers.rows() == 4);
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            CHECK((blobs.centers.row(a) - blobs.centers.row(b)).norm() >= 6.0);
        }
    }
    const BlobData again = make_blobs(25, 4, 3, 6.0, 0.5, 99);
    CHECK(blobs.features == again.features);
    const BlobData other = make_blobs(25, 4, 3, 6.0, 0.5, 100);
    CHECK(blobs.features != other.features);
    CHECK_THROWS_AS(make_blobs(0, 2, 2, 1.0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_blobs(5, 2, 2, 0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("blob csv writers round-trip through the ingester") {
    const fs::path dir = fresh_dir("qkc_blob_csv");
    const BlobData blobs = make_blobs(7, 2, 3, 5.0, 1.0, 3);
    save_blobs_csv(blobs, dir / "features.csv", dir / "labels.csv");
    const Dataset data = ingest_csv(dir / "features.csv");
    REQUIRE(data.n_samples() == 14);
    CHECK(data.ids.front() == "s00001");
    CHECK(data.ids.back() == "s00014");
    CHECK(data.feature_names == std::vector<std::string>{"f0", "f1", "f2"});
    CHECK(data.features == blobs.features);  // %.17g round-trips doubles exactly

    std::ifstream labels(dir / "labels.csv");
    std::string line;
    REQUIRE(std::getline(labels, line));
    CHECK(line == "id,label");
    int rows = 0;
    while (std::getline(labels, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 14);
    fs::remove_all(dir);
}

TEST_CASE("sweep configs round-trip through json") {
    const std::string text = R"({
      "feature_families": ["Z", "RBF"],
      "betas": [0.5, 1.5],
      "k_range": [2, 4],
      "sample_sizes": [50, "full"],
      "sc_threshold": 0.25,
      "seeds": [3, 4],
      "noise": {"p1": 0.002, "p2": 0.02, "p_readout": 0.01, "shots": 1024}
    })";
    const SweepConfig config = SweepConfig::from_json_text(text);
    CHECK(config.feature_families ==
          std::vector<SweepFamily>{SweepFamily::Z, SweepFamily::Rbf});
    CHECK(config.betas == std::vector<double>{0.5, 1.5});
    CHECK(config.k_min == 2);
    CHECK(config.k_max == 4);
    CHECK(config.sample_sizes == std::vector<int>{50, kFullDataset});
    CHECK(config.sc_threshold == 0.25);
    CHECK(config.seeds == std::vector<std::uint64_t>{3, 4});
    REQUIRE(config.noise.has_value());
    CHECK(config.noise->p1 == 0.002);
    CHECK(config.noise->p2 == 0.02);
    CHECK(config.noise->p_readout == 0.01);
    CHECK(config.noise->shots == 1024);

    const SweepConfig reparsed = SweepConfig::from_json_text(config.to_json_text());
    CHECK(reparsed.feature_families == config.feature_families);
    CHECK(reparsed.betas == config.betas);
    CHECK(reparsed.k_min == config.k_min);
    CHECK(reparsed.k_max == config.k_max);
    CHECK(reparsed.sample_sizes == config.sample_sizes);
    CHECK(reparsed.sc_threshold == config.sc_threshold);
    CHECK(reparsed.seeds == config.seeds);
    CHECK(reparsed.noise->shots == config.noise->shots);

    // Defaults survive a round trip too (noise stays absent).
    const SweepConfig defaults;
    const SweepConfig redefaults = SweepConfig::from_json_text(defaults.to_json_text());
    CHECK(redefaults.betas == defaults.betas);
    CHECK(redefaults.sample_sizes == defaults.sample_sizes);
    CHECK_FALSE(redefaults.noise.has_value());
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
    const auto expect_parse_error = [](const std::string& text, const std::string& needle) {
        try {
            SweepConfig::from_json_text(text);
            FAIL_CHECK("expected an error containing '" << needle << "'");
        } catch (const std::exception& error) {
            const std::string what = error.what();
            CHECK_MESSAGE(what.find(needle) != std::string::npos, "message was: " << what);
        }
    };
    expect_parse_error(R"({"betaz": [1.0]})", "unknown config key 'betaz'");
    expect_parse_error(R"({"noise": {"shotz": 5}})", "unknown config key 'noise.shotz'");
    expect_parse_error(R"({"feature_families": ["Q"]})", "Q");
    expect_parse_error(R"({"k_range": [2]})", "k_range");
    expect_parse_error(R"({"sample_sizes": ["half"]})", "full");
    expect_parse_error("not json at all", "");

    SweepConfig config;
    config.feature_families = {SweepFamily::Z, SweepFamily::Z};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SweepConfig{};
    config.betas = {7.0};  // beyond 2 pi
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SweepConfig{};
    config.k_min = 1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SweepConfig{};
    config.k_max = 1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SweepConfig{};
    config.sample_sizes = {1};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SweepConfig{};
    config.sc_threshold = 1.5;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SweepConfig{};
    config.seeds = {};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SweepConfig{};
    config.feature_families = {SweepFamily::ZZLinear};
    config.betas = {};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.feature_families = {SweepFamily::Rbf};  // no quantum family: betas optional
    config.validate();
}

TEST_CASE("silhouette sweep emits one record per cell") {
    const BlobData blobs = make_blobs(10, 3, 3, 8.0, 1.0, 7);
    SweepConfig config;
    config.feature_families = {SweepFamily::Z, SweepFamily::Rbf};
    config.betas = {1.5707963267948966};
    config.k_min = 2;
    config.k_max = 3;
    config.seeds = {4};
    RunOptions options;
    std::vector<FailureEntry> failures;
    const std::vector<ExperimentRecord> records =
        run_sc_sweep(blobs.features, config, options, failures);
    CHECK(failures.empty());
    REQUIRE(records.size() == 4);  // (Z beta) x {2,3} + RBF x {2,3}
    for (const ExperimentRecord& record : records) {
        CHECK(is_hex16(record.run_id));
        CHECK(is_hex16(record.config_digest));
        CHECK(record.n_samples == 30);
        CHECK(record.seed == 4);
        CHECK(record.sc >= -1.0);
        CHECK(record.sc <= 1.0);
        CHECK_FALSE(record.ami_vs_full.has_value());
        CHECK_FALSE(record.ami_vs_ideal.has_value());
        if (record.family == SweepFamily::Rbf) {
            CHECK(record.kernel_kind == KernelKind::Rbf);
            CHECK_FALSE(record.beta.has_value());
            CHECK(record.circuit_depth == 0);
            CHECK(record.two_qubit_count == 0);
        } else {
            CHECK(record.kernel_kind == KernelKind::QuantumExact);
            CHECK(record.beta == 1.5707963267948966);
            CHECK(record.circuit_depth > 0);
            CHECK(record.two_qubit_count == 0);  // no entanglers in the Z family
        }
    }
    // run_ids must be unique.
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (std::size_t j = i + 1; j < records.size(); ++j) {
            CHECK(records[i].run_id != records[j].run_id);
        }
    }
}

TEST_CASE("cells that cannot run are logged and the rest survive") {
    const BlobData blobs = make_blobs(2, 2, 2, 6.0, 0.5, 13);  // N = 4
    SweepConfig config;
    config.feature_families = {SweepFamily::ZZLinear, SweepFamily::Rbf};
    config.betas = {1.0};
    config.k_min = 2;
    config.k_max = 5;  // k = 5 exceeds N = 4
    config.seeds = {0};
    RunOptions options;
    std::vector<FailureEntry> failures;
    const std::vector<ExperimentRecord> records =
        run_sc_sweep(blobs.features, config, options, failures);
    CHECK(records.size() == 6);  // two families x k in {2, 3, 4}
    REQUIRE(failures.size() == 2);
    for (const FailureEntry& failure : failures) {
        CHECK(failure.cell.find("k=5") != std::string::npos);
        CHECK_FALSE(failure.message.empty());
    }
}

TEST_CASE("sample complexity reproduces full-data labels at full size") {
    const BlobData blobs = make_blobs(15, 3, 3, 8.0, 1.0, 17);  // N = 45
    SweepConfig config;
    config.feature_families = {SweepFamily::Z, SweepFamily::Rbf};
    config.betas = {1.0};
    config.k_min = 3;
    config.k_max = 3;
    config.sample_sizes = {20, kFullDataset};
    config.sc_threshold = -1.0;  // keep every cell
    config.seeds = {0, 1};
    RunOptions options;
    std::vector<FailureEntry> failures;
    const std::vector<ExperimentRecord> records =
        run_sample_complexity(blobs.features, config, options, failures);
    CHECK(failures.empty());
    REQUIRE(records.size() == 8);  // 2 families x 2 sizes x 2 seeds
    int full_records = 0;
    for (const ExperimentRecord& record : records) {
        REQUIRE(record.ami_vs_full.has_value());
        CHECK(*record.ami_vs_full <= 1.0 + 1e-12);
        CHECK(record.k == 3);
        if (record.n_samples == 45) {
            ++full_records;
            CHECK(*record.ami_vs_full == 1.0);  // same rows, same seed, same labels
        } else {
            CHECK(record.n_samples == 20);
        }
        CHECK(is_hex16(record.run_id));
    }
    CHECK(full_records == 4);
}

TEST_CASE("an unreachable silhouette threshold selects nothing") {
    const FeatureMatrix features = uniform_features(24, 3, 5);
    SweepConfig config;
    config.feature_families = {SweepFamily::Rbf};
    config.betas = {};
    config.k_min = 2;
    config.k_max = 3;
    config.sample_sizes = {10};
    config.sc_threshold = 0.99;
    config.seeds = {0};
    RunOptions options;
    std::vector<FailureEntry> failures;
    const std::vector<ExperimentRecord> records =
        run_sample_complexity(features, config, options, failures);
    CHECK(records.empty());
    CHECK(failures.empty());
}

TEST_CASE("noise comparison pairs each noisy run with its exact twin") {
    const BlobData blobs = make_blobs(8, 2, 2, 6.0, 1.0, 23);  // N = 16
    SweepConfig config;
    config.feature_families = {SweepFamily::Z, SweepFamily::Rbf};  // RBF is skipped
    config.betas = {1.5};
    config.k_min = 2;
    config.k_max = 2;
    config.seeds = {0, 1};
    NoiseConfig noise;
    noise.shots = 256;
    config.noise = noise;
    RunOptions options;
    options.noise_subset = 10;
    std::vector<FailureEntry> failures;
    const std::vector<ExperimentRecord> records =
        run_noise_comparison(blobs.features, config, options, failures);
    CHECK(failures.empty());
    REQUIRE(records.size() == 4);  // (Z, 1.5) x 2 seeds x (exact + sampled)
    int exact_count = 0;
    int sampled_count = 0;
    for (const ExperimentRecord& record : records) {
        CHECK(record.family == SweepFamily::Z);
        CHECK(record.n_samples == 10);
        CHECK(record.k == 2);
        if (record.kernel_kind == KernelKind::QuantumExact) {
            ++exact_count;
            CHECK_FALSE(record.ami_vs_ideal.has_value());
        } else {
            REQUIRE(record.kernel_kind == KernelKind::QuantumSampled);
            ++sampled_count;
            REQUIRE(record.ami_vs_ideal.has_value());
            CHECK(*record.ami_vs_ideal <= 1.0 + 1e-12);
        }
    }
    CHECK(exact_count == 2);
    CHECK(sampled_count == 2);

    SweepConfig no_noise = config;
    no_noise.noise.reset();
    CHECK_THROWS_AS(run_noise_comparison(blobs.features, no_noise, options, failures),
                    std::invalid_argument);
}

TEST_CASE("emitted results read back and re-emit byte-identically") {
    const BlobData blobs = make_blobs(10, 3, 3, 8.0, 1.0, 29);
    SweepConfig config;
    config.feature_families = {SweepFamily::Z, SweepFamily::Rbf};
    config.betas = {0.78539816339744831, 1.5707963267948966};
    config.k_min = 2;
    config.k_max = 4;
    config.seeds = {6};
    RunOptions options;
    std::vector<FailureEntry> failures;
    const std::vector<ExperimentRecord> records =
        run_sc_sweep(blobs.features, config, options, failures);
    REQUIRE_FALSE(records.empty());

    const fs::path dir_a = fresh_dir("qkc_emit_a");
    const fs::path dir_b = fresh_dir("qkc_emit_b");
    emit_results(records, failures, dir_a);
    emit_results(records, failures, dir_b);

    CHECK(fs::exists(dir_a / "records.csv"));
    CHECK(fs::exists(dir_a / "records.json"));
    CHECK(fs::exists(dir_a / "pivot_z.csv"));
    CHECK(fs::exists(dir_a / "pivot_rbf.csv"));
    CHECK_FALSE(fs::exists(dir_a / "pivot_zz_linear.csv"));  // family absent from the run
    CHECK(fs::exists(dir_a / "failures.log"));

    CHECK(slurp(dir_a / "records.csv") == slurp(dir_b / "records.csv"));
    CHECK(slurp(dir_a / "records.csv").find("wall_time") == std::string::npos);
    CHECK(slurp(dir_a / "records.json").find("wall_time_ms") != std::string::npos);

    // The pivot holds one row per k plus a header.
    const std::string pivot = slurp(dir_a / "pivot_z.csv");
    CHECK(pivot.find("k,beta=") == 0);
    CHECK(std::count(pivot.begin(), pivot.end(), '\n') == 4);

    std::vector<ExperimentRecord> reread = read_records_csv(dir_a / "records.csv");
    // emit_results sorts its copy; sort the originals the same way for comparison.
    std::vector<ExperimentRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(),
              [](const ExperimentRecord& a, const ExperimentRecord& b) {
                  const auto key = [](const ExperimentRecord& r) {
                      return std::make_tuple(static_cast<int>(r.family), r.beta.value_or(-1.0),
                                             r.k, r.n_samples, r.seed,
                                             static_cast<int>(r.kernel_kind), r.run_id);
                  };
                  return key(a) < key(b);
              });
    check_records_equal(reread, sorted, true);

    CHECK_THROWS_AS(emit_results({}, failures, dir_a), std::invalid_argument);
    CHECK_THROWS_AS(read_records_csv(dir_a / "missing.csv"), std::runtime_error);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("family names are stable") {
    CHECK(std::string(sweep_family_name(SweepFamily::Z)) == "Z");
    CHECK(std::string(sweep_family_name(SweepFamily::ZZLinear)) == "ZZLinear");
    CHECK(std::string(sweep_family_name(SweepFamily::ZZFull)) == "ZZFull");
    CHECK(std::string(sweep_family_name(SweepFamily::Rbf)) == "RBF");
}

}  // TEST_SUITE
