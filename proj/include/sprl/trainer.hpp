#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sprl/adam.hpp"
#include "sprl/curriculum.hpp"
#include "sprl/dataset.hpp"
#include "sprl/losses.hpp"
#include "sprl/model.hpp"
#include "sprl/noise.hpp"

namespace sprl {

enum class Method { sprl, standard, bootstrap, kd, label_smooth, spl };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

/// Whether a method runs the warmup-then-selection loop (as opposed to using
/// its own loss from epoch 1).
bool uses_curriculum(Method m);

struct TrainConfig {
    PaceConfig pace;  // sample_count and initial_size are resolved by train()
    NoiseSpec noise;  // for the record; corruption happens before train()
    int batch_size = 128;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
    Method method = Method::sprl;
    double augment_sigma = 0.0;

    std::vector<int> hidden_sizes = {64, 64};
    Activation activation = Activation::relu;
    double bootstrap_beta = 0.8;
    double spl_threshold = 0.6931471805599453;  // ln 2: keep samples with p > 0.5
    std::optional<double> known_noise_rate;     // epsilon-known path for m
    std::optional<int> initial_size_override;   // fixes m, skipping choose rule
    std::optional<int> lr_decay_start;          // default floor(0.4 T)
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double test_accuracy = 0.0;
    int selected_count = 0;
    double selection_precision = 0.0;
    double gamma_t = 0.0;
    int delta_t = 0;
    double lr_t = 0.0;
};

/// Mutable state of one training run; owned by a single logical thread.
struct TrainerState {
    ModelParams params;
    AdamState adam;
    LrSchedule schedule;
    PredictionMemory memory;
    PaceConfig pace;
    bool pace_resolved = false;
    std::vector<int> confident_history;           // per warmup epoch
    std::vector<double> last_epoch_batch_losses;  // batch loss values, in order
};

struct TrainResult {
    std::vector<EpochMetrics> history;
    ModelParams params;
    int chosen_initial_size = 0;
    std::vector<double> val_accuracy;  // filled only when a val split is given
};

/// Argmax-prediction accuracy; argmax ties break toward the lowest class.
double evaluate(const ModelParams& params, const DenseMatrix& features,
                std::span<const int> labels);

TrainerState init_trainer(const TrainConfig& cfg, const Dataset& dataset);

/// Fix m from the warmup history (or the override / known-noise rule) and
/// validate the resulting pace. Called by train() at the end of warmup.
void finalize_pace(TrainerState& state, const TrainConfig& cfg);

/// One plain-CE epoch over all samples. Records each sample's forward
/// probabilities into memory and the confident count for the m rule.
EpochMetrics warmup_epoch(TrainerState& state, const Dataset& dataset, const TrainConfig& cfg,
                          int epoch);

/// One curriculum epoch: select delta(t-1) confident samples from
/// previous-epoch losses, then sweep all samples in mini-batches with the
/// combined loss at gamma(t), overwriting memory rows after each update.
EpochMetrics sprl_epoch(TrainerState& state, const Dataset& dataset, const TrainConfig& cfg,
                        int epoch);

TrainResult train(const TrainConfig& cfg, const Dataset& dataset);
TrainResult train(const TrainConfig& cfg, const Dataset& dataset,
                  const DenseMatrix* val_features, const std::vector<int>* val_labels);

/// Same loop skeleton with a non-sprl method's loss.
TrainResult train_baseline(Method method, TrainConfig cfg, const Dataset& dataset);

}  // namespace sprl
