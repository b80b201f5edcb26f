#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sprl/curriculum.hpp"
#include "sprl/dataset.hpp"
#include "sprl/trainer.hpp"

namespace sprl {

/// One experiment invocation: dataset choice, corruption, methods to train,
/// schedule knobs, output directory. Mirrors the CLI flag for flag.
struct ExperimentOptions {
    std::string dataset = "blobs";  // blobs | idx | csv
    int blobs_total = 2000;
    int blobs_classes = 4;
    int blobs_dim = 20;
    double blobs_separation = 2.0;
    std::string idx_images, idx_labels;
    int limit = 0;  // 0 keeps everything
    std::string csv_features, csv_labels;

    std::string noise = "none";  // none | symmetric | pair | model
    double rate = 0.0;
    double model_fraction = 0.1;
    int model_epochs = 60;

    std::vector<std::string> methods = {"sprl"};

    int epochs = 200;
    int t1 = 20;
    int k = 10;
    double gamma_d = 10.0;
    std::optional<int> m_override;
    int batch = 128;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    double val_fraction = 0.0;
    std::string out_dir = "sprl_out";
    bool emit_schedules = false;

    std::vector<int> hidden = {64, 64};
    std::string activation = "relu";
    double augment_sigma = 0.0;
    std::optional<double> known_rate;
    double spl_lambda = 0.6931471805599453;
    double bootstrap_beta = 0.8;
    int worker_slots = 0;  // 0: take SPRL_THREADS from the environment, else 1
};

struct RunSummary {
    std::string method;
    double last10_avg_acc = 0.0;
    double max_acc = 0.0;
    double final_noise_rate_realized = 0.0;
    std::string per_epoch_csv_path;
    int suggested_warmup = 0;  // best-validation epoch; 0 when no val split
};

/// Average test accuracy over the final (up to) ten epochs.
double last10_average(const std::vector<EpochMetrics>& history);

void write_epoch_csv(const std::string& path, const std::vector<EpochMetrics>& history);

/// Builds the dataset, applies the corruption, trains every requested method
/// (fanning out over SPRL_THREADS worker slots), writes per-epoch CSVs plus a
/// comparative summary, and prints one line per method.
std::vector<RunSummary> run_experiment(const ExperimentOptions& opts);

/// Two-column (t, value) CSVs of the pace and weight schedules.
void emit_schedule_csvs(const PaceConfig& pace, const std::string& dir);

}  // namespace sprl
