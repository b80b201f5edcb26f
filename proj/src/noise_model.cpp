#include <iostream>
#include <stdexcept>

#include "sprl/noise.hpp"
#include "sprl/rng.hpp"
#include "sprl/trainer.hpp"

namespace sprl {

ModelNoiseResult model_generated_noise(const Dataset& dataset, double labeled_fraction,
                                       const TrainConfig& weak_config, std::uint64_t seed) {
    if (labeled_fraction <= 0.0 || labeled_fraction > 1.0)
        throw std::invalid_argument("model_generated_noise: fraction must lie in (0, 1]");

    const int n = dataset.train_size();
    const int take = std::max(1, static_cast<int>(labeled_fraction * n));

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    SplitRng rng(seed, Stream::noise, 0x7765616b /* "weak" */);
    rng.shuffle(order);
    order.resize(take);

    Dataset labeled;
    labeled.name = dataset.name + "-labeled";
    labeled.class_count = dataset.class_count;
    labeled.train_features = gather_rows(dataset.train_features, order);
    labeled.train_true_labels.reserve(take);
    for (int i : order) labeled.train_true_labels.push_back(dataset.train_true_labels[i]);
    labeled.train_noisy_labels = labeled.train_true_labels;
    labeled.test_features = dataset.test_features;
    labeled.test_labels = dataset.test_labels;

    std::vector<int> present(dataset.class_count, 0);
    for (int y : labeled.train_true_labels) present[y] = 1;
    for (int k = 0; k < dataset.class_count; ++k)
        if (!present[k])
            std::cerr << "model_generated_noise: class " << k
                      << " absent from the labeled subset, proceeding\n";

    TrainConfig cfg = weak_config;
    cfg.method = Method::standard;
    cfg.batch_size = std::min(cfg.batch_size, take);
    const TrainResult weak = train(cfg, labeled);

    ModelNoiseResult out;
    out.weak_test_accuracy = evaluate(weak.params, dataset.test_features, dataset.test_labels);

    const DenseMatrix probs = forward(weak.params, dataset.train_features);
    out.noisy_labels.resize(n);
    int flipped = 0;
    for (int i = 0; i < n; ++i) {
        auto row = probs.row(i);
        int arg = 0;
        for (int j = 1; j < probs.cols; ++j)
            if (row[j] > row[arg]) arg = j;
        out.noisy_labels[i] = arg;
        if (arg != dataset.train_true_labels[i]) ++flipped;
    }
    out.realized_noise_rate = static_cast<double>(flipped) / n;
    return out;
}

}  // namespace sprl
