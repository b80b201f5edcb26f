#include "sprl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sprl {

Method method_from_name(const std::string& name) {
    if (name == "sprl") return Method::sprl;
    if (name == "standard") return Method::standard;
    if (name == "bootstrap") return Method::bootstrap;
    if (name == "kd") return Method::kd;
    if (name == "label_smooth") return Method::label_smooth;
    if (name == "spl") return Method::spl;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::sprl: return "sprl";
        case Method::standard: return "standard";
        case Method::bootstrap: return "bootstrap";
        case Method::kd: return "kd";
        case Method::label_smooth: return "label_smooth";
        case Method::spl: return "spl";
    }
    return "?";
}

bool uses_curriculum(Method m) {
    return m == Method::sprl || m == Method::kd || m == Method::label_smooth ||
           m == Method::spl;
}

double evaluate(const ModelParams& params, const DenseMatrix& features,
                std::span<const int> labels) {
    if (features.rows != static_cast<int>(labels.size()))
        throw std::invalid_argument("evaluate: feature/label count mismatch");
    const DenseMatrix probs = forward(params, features);
    int correct = 0;
    for (int i = 0; i < probs.rows; ++i) {
        auto row = probs.row(i);
        int arg = 0;
        for (int j = 1; j < probs.cols; ++j)
            if (row[j] > row[arg]) arg = j;
        if (arg == labels[i]) ++correct;
    }
    return features.rows == 0 ? 0.0 : static_cast<double>(correct) / features.rows;
}

namespace {

void validate_config(const TrainConfig& cfg, const Dataset& ds) {
    const int n = ds.train_size();
    if (n <= 0) throw std::invalid_argument("train: empty training set");
    if (cfg.batch_size < 1 || cfg.batch_size > n)
        throw std::invalid_argument("train: batch_size must lie in [1, n]");
    if (cfg.pace.total_epochs < 1) throw std::invalid_argument("train: total epochs must be >= 1");
    if (cfg.pace.warmup_epochs < 1 || cfg.pace.warmup_epochs > cfg.pace.total_epochs)
        throw std::invalid_argument("train: warmup epochs must lie in [1, T]");
    if (cfg.learning_rate < 0.0) throw std::invalid_argument("train: negative learning rate");
    if (cfg.augment_sigma < 0.0) throw std::invalid_argument("train: negative augment sigma");
    if (cfg.bootstrap_beta < 0.0 || cfg.bootstrap_beta > 1.0)
        throw std::invalid_argument("train: bootstrap beta must lie in [0,1]");
    if (cfg.known_noise_rate && (*cfg.known_noise_rate < 0.0 || *cfg.known_noise_rate >= 1.0))
        throw std::invalid_argument("train: known noise rate must lie in [0,1)");
    if (cfg.hidden_sizes.size() > 2)
        throw std::invalid_argument("train: at most two hidden layers");
    if (!std::isfinite(cfg.spl_threshold))
        throw std::invalid_argument("train: spl threshold must be finite");

    // Degenerate pace configurations must surface before epoch 1. m may only
    // be known after warmup; its clamp floor is the worst case for the step
    // length, so validating with it covers every reachable m.
    if (uses_curriculum(cfg.method) && cfg.method != Method::spl &&
        cfg.pace.warmup_epochs < cfg.pace.total_epochs) {
        PaceConfig probe = cfg.pace;
        probe.sample_count = n;
        probe.initial_size = cfg.initial_size_override
                                 ? *cfg.initial_size_override
                                 : initial_size_floor(n);
        validate_pace(probe);
    }
}

DenseMatrix gather_batch(const DenseMatrix& features, std::span<const int> idx, double sigma,
                         SplitRng& augment_rng) {
    DenseMatrix x = gather_rows(features, idx);
    if (sigma > 0.0)
        for (double& v : x.data) v += sigma * augment_rng.normal();
    return x;
}

struct EpochPlan {
    std::vector<std::uint8_t> selected;  // length n
    double gamma_t = 0.0;
    bool curriculum_active = false;      // selection from memory happened
};

EpochPlan plan_epoch(TrainerState& state, const Dataset& ds, const TrainConfig& cfg,
                     int epoch) {
    const int n = ds.train_size();
    EpochPlan plan;
    plan.selected.assign(n, 1);

    const bool past_warmup = epoch > state.pace.warmup_epochs;
    if (!past_warmup || !uses_curriculum(cfg.method)) return plan;

    if (state.memory.epoch_tag != epoch - 1)
        throw std::logic_error("trainer: prediction memory lags selection by " +
                               std::to_string(epoch - state.memory.epoch_tag) +
                               " epochs, expected 1");

    std::vector<double> losses(n);
    for (int i = 0; i < n; ++i)
        losses[i] = -std::log(clamp_prob(state.memory.probs.at(i, ds.train_noisy_labels[i])));

    plan.curriculum_active = true;
    if (cfg.method == Method::spl) {
        plan.selected = spl_select(losses, cfg.spl_threshold);
        return plan;
    }

    if (!state.pace_resolved) throw std::logic_error("trainer: pace not resolved before selection");
    const int count = curriculum_size(epoch - 1, state.pace);
    plan.selected = select_confident(losses, count).selected;
    plan.gamma_t = resistance_weight(epoch, state.pace);
    return plan;
}

EpochMetrics run_epoch(TrainerState& state, const Dataset& ds, const TrainConfig& cfg,
                       int epoch) {
    const int n = ds.train_size();
    const EpochPlan plan = plan_epoch(state, ds, cfg, epoch);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    SplitRng shuffle_rng(cfg.seed, Stream::shuffle, static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    SplitRng augment_rng(cfg.seed, Stream::augment, static_cast<std::uint64_t>(epoch));

    state.last_epoch_batch_losses.clear();
    double loss_sum = 0.0;

    std::vector<int> idx;
    std::vector<int> labels_b;
    std::vector<std::uint8_t> v_b;
    for (int start = 0; start < n; start += cfg.batch_size) {
        const int stop = std::min(start + cfg.batch_size, n);
        idx.assign(order.begin() + start, order.begin() + stop);
        labels_b.resize(idx.size());
        v_b.resize(idx.size());
        for (std::size_t b = 0; b < idx.size(); ++b) {
            labels_b[b] = ds.train_noisy_labels[idx[b]];
            v_b[b] = plan.selected[idx[b]];
        }

        const DenseMatrix xb = gather_batch(ds.train_features, idx, cfg.augment_sigma, augment_rng);
        ForwardCache cache;
        const DenseMatrix probs = forward(state.params, xb, &cache);
        const DenseMatrix prev = gather_rows(state.memory.probs, idx);

        BatchLoss bl;
        if (cfg.method == Method::bootstrap) {
            bl = bootstrap_batch_loss(probs, labels_b, cfg.bootstrap_beta);
        } else if (!plan.curriculum_active) {
            // Warmup and the standard baseline: plain mean cross-entropy.
            std::vector<std::uint8_t> ones(idx.size(), 1);
            bl = combined_batch_loss(probs, prev, labels_b, ones, 0.0, Regularizer::resistance);
        } else {
            Regularizer reg = Regularizer::resistance;
            if (cfg.method == Method::kd) reg = Regularizer::kd;
            if (cfg.method == Method::label_smooth) reg = Regularizer::label_smooth;
            const double gamma = cfg.method == Method::spl ? 0.0 : plan.gamma_t;
            bl = combined_batch_loss(probs, prev, labels_b, v_b, gamma, reg);
        }

        const Gradients grads = backward(state.params, cache, bl.grad);
        adam_step(state.params, grads, state.adam, epoch, state.schedule);

        // Memory rows take this batch's forward probabilities only after the
        // update they drove; the next epoch selects against these.
        for (std::size_t b = 0; b < idx.size(); ++b) {
            auto src = probs.row(static_cast<int>(b));
            std::copy(src.begin(), src.end(), state.memory.probs.row(idx[b]).begin());
        }

        loss_sum += bl.value * static_cast<double>(idx.size());
        state.last_epoch_batch_losses.push_back(bl.value);
    }
    state.memory.epoch_tag = epoch;

    if (epoch <= state.pace.warmup_epochs) {
        int confident = 0;
        for (int i = 0; i < n; ++i)
            if (state.memory.probs.at(i, ds.train_noisy_labels[i]) >= 0.5) ++confident;
        state.confident_history.push_back(confident);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / n;
    m.test_accuracy = evaluate(state.params, ds.test_features, ds.test_labels);
    int sel_count = 0, sel_clean = 0;
    for (int i = 0; i < n; ++i) {
        if (!plan.selected[i]) continue;
        ++sel_count;
        if (ds.train_noisy_labels[i] == ds.train_true_labels[i]) ++sel_clean;
    }
    m.selected_count = sel_count;
    m.selection_precision = sel_count > 0 ? static_cast<double>(sel_clean) / sel_count : 0.0;
    m.gamma_t = plan.gamma_t;
    m.delta_t = (state.pace_resolved && epoch > state.pace.warmup_epochs &&
                 uses_curriculum(cfg.method) && cfg.method != Method::spl)
                    ? curriculum_size(epoch, state.pace)
                    : n;
    m.lr_t = state.schedule.lr_at(state.adam.base_lr, epoch);
    return m;
}

}  // namespace

TrainerState init_trainer(const TrainConfig& cfg, const Dataset& dataset) {
    validate_config(cfg, dataset);
    TrainerState state;
    SplitRng init_rng(cfg.seed, Stream::init);
    state.params = make_mlp(dataset.train_features.cols, cfg.hidden_sizes, dataset.class_count,
                            cfg.activation, init_rng);
    state.adam = make_adam_state(state.params, cfg.learning_rate);
    state.schedule = default_schedule(cfg.pace.total_epochs);
    if (cfg.lr_decay_start) {
        if (*cfg.lr_decay_start < 1 || *cfg.lr_decay_start >= cfg.pace.total_epochs)
            throw std::invalid_argument("train: lr decay start must lie in [1, T)");
        state.schedule.decay_start = *cfg.lr_decay_start;
    }
    state.memory = PredictionMemory::uniform(dataset.train_size(), dataset.class_count);
    state.pace = cfg.pace;
    state.pace.sample_count = dataset.train_size();
    return state;
}

void finalize_pace(TrainerState& state, const TrainConfig& cfg) {
    const int n = state.pace.sample_count;
    state.pace.initial_size =
        cfg.initial_size_override
            ? *cfg.initial_size_override
            : choose_initial_size(state.confident_history, cfg.known_noise_rate, n);
    if (state.pace.warmup_epochs < state.pace.total_epochs) validate_pace(state.pace);
    state.pace_resolved = true;
}

EpochMetrics warmup_epoch(TrainerState& state, const Dataset& dataset, const TrainConfig& cfg,
                          int epoch) {
    if (epoch > state.pace.warmup_epochs)
        throw std::invalid_argument("warmup_epoch: epoch past warmup");
    return run_epoch(state, dataset, cfg, epoch);
}

EpochMetrics sprl_epoch(TrainerState& state, const Dataset& dataset, const TrainConfig& cfg,
                        int epoch) {
    if (epoch <= state.pace.warmup_epochs || epoch > state.pace.total_epochs)
        throw std::invalid_argument("sprl_epoch: epoch outside (T1, T]");
    return run_epoch(state, dataset, cfg, epoch);
}

TrainResult train(const TrainConfig& cfg, const Dataset& dataset) {
    return train(cfg, dataset, nullptr, nullptr);
}

TrainResult train(const TrainConfig& cfg, const Dataset& dataset,
                  const DenseMatrix* val_features, const std::vector<int>* val_labels) {
    TrainerState state = init_trainer(cfg, dataset);
    TrainResult result;
    for (int epoch = 1; epoch <= state.pace.total_epochs; ++epoch) {
        result.history.push_back(run_epoch(state, dataset, cfg, epoch));
        if (epoch == state.pace.warmup_epochs && uses_curriculum(cfg.method) &&
            cfg.method != Method::spl && epoch < state.pace.total_epochs)
            finalize_pace(state, cfg);
        if (val_features && val_labels)
            result.val_accuracy.push_back(evaluate(state.params, *val_features, *val_labels));
    }
    result.params = std::move(state.params);
    result.chosen_initial_size = state.pace_resolved ? state.pace.initial_size : 0;
    return result;
}

TrainResult train_baseline(Method method, TrainConfig cfg, const Dataset& dataset) {
    if (method == Method::sprl)
        throw std::invalid_argument("train_baseline: use train() for sprl");
    cfg.method = method;
    return train(cfg, dataset);
}

}  // namespace sprl
