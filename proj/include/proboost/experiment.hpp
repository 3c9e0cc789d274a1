#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "proboost/boosting.hpp"
#include "proboost/dataset.hpp"
#include "proboost/ensemble.hpp"
#include "proboost/metrics.hpp"
#include "proboost/stats.hpp"
#include "proboost/train.hpp"

namespace proboost {

struct DatasetConfig {
    std::string kind = "synthetic";  // synthetic | idx | csv

    // idx sources (base set, plus donor set for superimposition); when the
    // provider ships a separate test pair, list it too and splits will honor
    // the provider boundary
    std::string images_path;
    std::string labels_path;
    std::string test_images_path;
    std::string test_labels_path;
    std::string donor_images_path;
    std::string donor_labels_path;

    // csv source
    std::string csv_path;
    std::vector<std::size_t> csv_feature_columns;

    // contamination recipe
    std::string contamination = "none";  // none | awgn | superimpose
    double awgn_mean = 255.0 / 2.0;
    double awgn_variance = 255.0 / 2.0;
    double superimpose_fraction = 0.25;

    // split: either the provider boundary or a stratified subsample
    std::size_t provider_train = 0;  // 0 = use subsamples below
    std::size_t train_subsample = 0;
    std::size_t test_subsample = 0;

    // synthetic generator parameters
    std::size_t synth_count = 2500;
    std::size_t synth_image_size = 14;
    int synth_classes = 10;
    double synth_jitter = 24.0;
    double synth_contrast = 1.0;
};

struct LearnerConfig {
    std::string family = "vi";  // det | vi | mcd
    std::string arch = "dense";  // dense | lenet
    std::vector<std::size_t> hidden = {32};
    double dropout_rate = 0.3;
    double prior_std = 1.0;
    std::size_t mc_samples = 0;  // 0 = family default (50 vi / 200 mcd)
};

struct ExperimentConfig {
    DatasetConfig dataset;
    LearnerConfig learner;
    std::string variant = "weighted";
    std::size_t levels = 1;
    double tau = 0.25;
    std::string weights = "vw";  // fw | vw | vwo
    std::size_t repetitions = 10;
    std::uint64_t base_seed = 1;
    std::string out_dir = "out";
    bool save_models = false;
    TrainConfig train;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

/// Identifier of one experiment cell (everything but the repetition index).
std::string cell_id(const ExperimentConfig& cfg);

/// FNV-1a 64-bit content hash, hex-encoded.
std::string content_hash_hex(const void* data, std::size_t bytes);

struct PreparedData {
    Dataset train;
    Dataset test;
    std::string hash;  // content hash over features and labels of both splits
};

/// Deterministic dataset construction for one repetition: contamination and
/// split draws derive from (base_seed, repetition) only, so every cell sees
/// the same data for the same repetition. Results are cached on disk under
/// out_dir/cache and reloaded when present.
PreparedData prepare_data(const ExperimentConfig& cfg, std::size_t repetition);

/// prepare-data command: materializes the caches for all repetitions and
/// writes a manifest with one content hash per repetition. Idempotent.
std::string cmd_prepare_data(const ExperimentConfig& cfg);

struct ResultRecord {
    std::string cell;
    std::size_t repetition = 0;
    std::uint64_t data_seed = 0;
    std::uint64_t train_seed = 0;
    nlohmann::json config_echo;
    MetricsReport metrics;
    std::vector<std::size_t> level_sizes;
    std::vector<double> psi;
    double wall_clock_s = 0.0;  // volatile; excluded from the canonical form

    /// Canonical serialization: everything except wall-clock timing.
    nlohmann::json canonical_json() const;
};

/// Runs every missing (cell, repetition) and returns all records for the
/// cell, newly run or previously recorded. Completed repetitions are not
/// re-run (records are append-only by file existence).
std::vector<ResultRecord> cmd_train(const ExperimentConfig& cfg);

/// Evaluate a saved boosted-model checkpoint on the config's test split.
MetricsReport cmd_evaluate(const ExperimentConfig& cfg, const std::string& model_dir,
                           std::size_t repetition = 0);

struct CellReport {
    std::string cell;
    std::size_t repetitions = 0;
    // per metric name: summary over repetitions
    std::vector<std::pair<std::string, RunSummary>> summaries;
};

struct ComparisonReport {
    std::string baseline;
    std::string treatment;
    // per metric: (roi of means, one-tailed paired p-value)
    std::vector<std::tuple<std::string, double, double>> rows;
};

std::vector<ResultRecord> load_records(const std::string& out_dir,
                                       const std::string& cell);
std::vector<std::string> list_record_cells(const std::string& out_dir);

CellReport summarize_cell(const std::vector<ResultRecord>& records);
ComparisonReport compare_cells(const std::vector<ResultRecord>& baseline,
                               const std::vector<ResultRecord>& treatment);

/// report command: per-cell summaries, treatment-vs-baseline ROI and paired
/// p-values, rendered as an aligned text table plus CSV files (summary.csv,
/// roi.csv) under out_dir.
std::string cmd_report(const std::string& out_dir, const std::string& baseline_cell,
                       const std::vector<std::string>& treatment_cells);

struct IrisTraceRow {
    std::size_t sample = 0;
    double sepal_length = 0.0;
    double petal_length = 0.0;
    int species = 0;
    std::vector<double> weight_at_level;       // training weight at each level
    std::vector<double> uncertainty_at_level;  // scored by each level's learner
    std::vector<bool> in_top_set;              // member of the hardest-tau set
};

struct IrisDemoResult {
    std::vector<IrisTraceRow> rows;
    std::vector<std::size_t> increments_per_level;  // weight bumps per transition
    bool class0_untouched = true;  // no class-0 sample in any transition's top set
};

/// demo command behind the Fig.-1 scenario: weighted boosting, three levels,
/// one flipout dense learner on (sepal length, petal length). Writes the
/// per-sample trace as CSV when trace_csv_path is non-empty.
IrisDemoResult cmd_demo_iris(const std::string& iris_csv, std::uint64_t seed,
                             const std::string& trace_csv_path = "");

}  // namespace proboost
