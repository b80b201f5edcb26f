#include "sprl/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "sprl/noise.hpp"
#include "sprl/rng.hpp"

namespace sprl {

double last10_average(const std::vector<EpochMetrics>& history) {
    if (history.empty()) return 0.0;
    const std::size_t take = std::min<std::size_t>(10, history.size());
    double sum = 0.0;
    for (std::size_t i = history.size() - take; i < history.size(); ++i)
        sum += history[i].test_accuracy;
    return sum / take;
}

void write_epoch_csv(const std::string& path, const std::vector<EpochMetrics>& history) {
    CsvTable t;
    t.header = {"epoch",           "train_loss",          "test_acc", "selected_count",
                "selection_precision", "gamma_t",         "delta_t",  "lr_t"};
    for (const auto& m : history)
        t.rows.push_back({static_cast<double>(m.epoch), m.train_loss, m.test_accuracy,
                          static_cast<double>(m.selected_count), m.selection_precision,
                          m.gamma_t, static_cast<double>(m.delta_t), m.lr_t});
    write_csv_table(path, t);
}

void emit_schedule_csvs(const PaceConfig& pace, const std::string& dir) {
    CsvTable dt, gt;
    dt.header = {"t", "value"};
    gt.header = {"t", "value"};
    for (int t = 1; t <= pace.total_epochs; ++t) {
        dt.rows.push_back({static_cast<double>(t), static_cast<double>(curriculum_size(t, pace))});
        gt.rows.push_back({static_cast<double>(t), resistance_weight(t, pace)});
    }
    write_csv_table(dir + "/delta_schedule.csv", dt);
    write_csv_table(dir + "/gamma_schedule.csv", gt);
}

namespace {

int worker_slots_from_env(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPRL_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return std::min(v, 64);
    }
    return 1;
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "leaky_relu") return Activation::leaky_relu;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

NoiseKind noise_kind_from_name(const std::string& name) {
    if (name == "none") return NoiseKind::none;
    if (name == "symmetric") return NoiseKind::symmetric;
    if (name == "pair") return NoiseKind::pair;
    if (name == "model") return NoiseKind::model_generated;
    throw std::invalid_argument("unknown noise kind '" + name + "'");
}

Dataset build_dataset(const ExperimentOptions& o) {
    if (o.dataset == "blobs")
        return make_blobs(o.blobs_total, o.blobs_classes, o.blobs_dim, o.blobs_separation, o.seed);
    if (o.dataset == "idx") {
        if (o.idx_images.empty() || o.idx_labels.empty())
            throw std::invalid_argument("--dataset idx requires --idx-images and --idx-labels");
        return load_idx(o.idx_images, o.idx_labels, o.limit, o.seed);
    }
    if (o.dataset == "csv") {
        if (o.csv_features.empty())
            throw std::invalid_argument("--dataset csv requires --csv-features");
        return load_csv(o.csv_features, o.csv_labels, o.seed);
    }
    throw std::invalid_argument("unknown dataset '" + o.dataset + "'");
}

TrainConfig base_config(const ExperimentOptions& o) {
    TrainConfig cfg;
    cfg.pace.warmup_epochs = o.t1;
    cfg.pace.total_epochs = o.epochs;
    cfg.pace.subset_count = o.k;
    cfg.pace.resistance_scale = o.gamma_d;
    cfg.noise.kind = noise_kind_from_name(o.noise);
    cfg.noise.rate = o.rate;
    cfg.noise.seed = o.seed;
    cfg.batch_size = o.batch;
    cfg.learning_rate = o.lr;
    cfg.seed = o.seed;
    cfg.augment_sigma = o.augment_sigma;
    cfg.hidden_sizes = o.hidden;
    cfg.activation = activation_from_name(o.activation);
    cfg.bootstrap_beta = o.bootstrap_beta;
    cfg.spl_threshold = o.spl_lambda;
    cfg.known_noise_rate = o.known_rate;
    cfg.initial_size_override = o.m_override;
    return cfg;
}

struct ValSplit {
    Dataset train;  // reduced training set
    DenseMatrix val_features;
    std::vector<int> val_labels;  // noisy labels, per the validation protocol
    bool active = false;
};

ValSplit carve_validation(const Dataset& ds, double fraction, std::uint64_t seed) {
    ValSplit out;
    if (fraction <= 0.0) {
        out.train = ds;
        return out;
    }
    if (fraction >= 0.5) throw std::invalid_argument("--val-fraction must lie in [0, 0.5)");
    const int n = ds.train_size();
    const int val_n = std::max(1, static_cast<int>(fraction * n));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    SplitRng rng(seed, Stream::shuffle, 0x76616c /* "val" */);
    rng.shuffle(order);

    std::vector<int> val_idx(order.begin(), order.begin() + val_n);
    std::vector<int> train_idx(order.begin() + val_n, order.end());
    std::sort(train_idx.begin(), train_idx.end());  // keep original ordering

    out.active = true;
    out.val_features = gather_rows(ds.train_features, val_idx);
    for (int i : val_idx) out.val_labels.push_back(ds.train_noisy_labels[i]);

    out.train.name = ds.name;
    out.train.class_count = ds.class_count;
    out.train.test_features = ds.test_features;
    out.train.test_labels = ds.test_labels;
    out.train.train_features = gather_rows(ds.train_features, train_idx);
    for (int i : train_idx) {
        out.train.train_true_labels.push_back(ds.train_true_labels[i]);
        out.train.train_noisy_labels.push_back(ds.train_noisy_labels[i]);
    }
    return out;
}

}  // namespace

std::vector<RunSummary> run_experiment(const ExperimentOptions& opts) {
    if (opts.methods.empty()) throw std::invalid_argument("no methods requested");
    std::vector<Method> methods;
    for (const auto& name : opts.methods) methods.push_back(method_from_name(name));
    const TrainConfig proto = base_config(opts);

    Dataset ds = build_dataset(opts);
    proto.noise.validate(ds.class_count);

    double weak_accuracy = -1.0;
    switch (proto.noise.kind) {
        case NoiseKind::none:
            break;
        case NoiseKind::symmetric:
            ds.train_noisy_labels =
                apply_noise(ds.train_true_labels, symmetric_matrix(ds.class_count, opts.rate),
                            opts.seed);
            break;
        case NoiseKind::pair:
            ds.train_noisy_labels = apply_noise(
                ds.train_true_labels, pair_matrix(ds.class_count, opts.rate), opts.seed);
            break;
        case NoiseKind::model_generated: {
            TrainConfig weak = proto;
            weak.method = Method::standard;
            weak.pace.total_epochs = opts.model_epochs;
            weak.pace.warmup_epochs = std::max(1, opts.model_epochs / 2);
            const ModelNoiseResult mn =
                model_generated_noise(ds, opts.model_fraction, weak, opts.seed);
            ds.train_noisy_labels = mn.noisy_labels;
            weak_accuracy = mn.weak_test_accuracy;
            break;
        }
    }

    std::filesystem::create_directories(opts.out_dir);
    if (proto.noise.kind != NoiseKind::none)
        write_noisy_labels_csv(ds.train_noisy_labels, opts.out_dir + "/noisy_labels.csv");

    const ValSplit split = carve_validation(ds, opts.val_fraction, opts.seed);
    const Dataset& train_ds = split.train;
    const double realized = train_ds.realized_noise_rate();

    std::vector<RunSummary> summaries(methods.size());
    std::vector<int> chosen_m(methods.size(), 0);
    auto run_one = [&](std::size_t mi) {
        TrainConfig cfg = proto;
        cfg.method = methods[mi];
        const TrainResult res =
            split.active ? train(cfg, train_ds, &split.val_features, &split.val_labels)
                         : train(cfg, train_ds);

        RunSummary& s = summaries[mi];
        s.method = method_name(cfg.method);
        s.last10_avg_acc = last10_average(res.history);
        for (const auto& m : res.history) s.max_acc = std::max(s.max_acc, m.test_accuracy);
        s.final_noise_rate_realized = realized;
        s.per_epoch_csv_path = opts.out_dir + "/" + s.method + "_epochs.csv";
        if (!res.val_accuracy.empty()) {
            const auto best =
                std::max_element(res.val_accuracy.begin(), res.val_accuracy.end());
            s.suggested_warmup = static_cast<int>(best - res.val_accuracy.begin()) + 1;
        }
        chosen_m[mi] = res.chosen_initial_size;
        write_epoch_csv(s.per_epoch_csv_path, res.history);
    };

    const int slots = worker_slots_from_env(opts.worker_slots);
    if (slots <= 1 || methods.size() <= 1) {
        for (std::size_t mi = 0; mi < methods.size(); ++mi) run_one(mi);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        for (std::size_t batch = 0; batch < methods.size(); batch += slots) {
            const std::size_t stop = std::min(methods.size(), batch + slots);
            for (std::size_t mi = batch; mi < stop; ++mi)
                pool.emplace_back([&, mi] { run_one(mi); });
            for (; next < pool.size(); ++next) pool[next].join();
        }
    }

    std::ofstream summary(opts.out_dir + "/summary.csv", std::ios::binary);
    summary << "method,last10_avg_acc,max_acc,final_noise_rate_realized,per_epoch_csv,"
               "suggested_t1\n";
    for (const auto& s : summaries)
        summary << s.method << ',' << format_double(s.last10_avg_acc) << ','
                << format_double(s.max_acc) << ',' << format_double(s.final_noise_rate_realized)
                << ',' << s.per_epoch_csv_path << ',' << s.suggested_warmup << '\n';

    if (opts.emit_schedules) {
        PaceConfig pace = proto.pace;
        pace.sample_count = train_ds.train_size();
        pace.initial_size = 0;
        for (std::size_t mi = 0; mi < methods.size(); ++mi)
            if (chosen_m[mi] > 0) {
                pace.initial_size = chosen_m[mi];
                break;
            }
        if (pace.initial_size == 0)
            pace.initial_size = opts.m_override.value_or(
                (initial_size_floor(pace.sample_count) + initial_size_ceiling(pace.sample_count)) / 2);
        emit_schedule_csvs(pace, opts.out_dir);
    }

    for (const auto& s : summaries) {
        std::cout << "method=" << s.method << " last10_avg=" << format_double(s.last10_avg_acc)
                  << " max=" << format_double(s.max_acc)
                  << " noise_rate=" << format_double(s.final_noise_rate_realized);
        if (s.suggested_warmup > 0) std::cout << " suggested_t1=" << s.suggested_warmup;
        std::cout << '\n';
    }
    if (weak_accuracy >= 0.0)
        std::cout << "weak_model_test_acc=" << format_double(weak_accuracy) << '\n';
    return summaries;
}

}  // namespace sprl
