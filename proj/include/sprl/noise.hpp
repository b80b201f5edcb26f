#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sprl/dataset.hpp"
#include "sprl/matrix.hpp"

namespace sprl {

struct TrainConfig;  // trainer.hpp; model_generated_noise trains a weak model

/// Row-stochastic label transition matrix: q[i][j] = Pr(noisy=j | true=i).
struct TransitionMatrix {
    int classes = 0;
    DenseMatrix q;

    void validate() const;  // rows sum to 1 within 1e-12, entries in [0,1]
};

enum class NoiseKind { none, symmetric, pair, model_generated };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double rate = 0.0;
    std::uint64_t seed = 1;

    void validate(int classes) const;
};

/// Diagonal 1-eps, eps/(c-1) elsewhere. Requires eps < (c-1)/c.
TransitionMatrix symmetric_matrix(int classes, double epsilon);

/// Diagonal 1-eps, entry (i, (i+1) mod c) = eps, zero elsewhere.
/// Requires eps < 0.5.
TransitionMatrix pair_matrix(int classes, double epsilon);

/// Every row uniform; resampling from it draws labels uniformly at random.
TransitionMatrix uniform_matrix(int classes);

/// Resample each label independently from its transition row. Deterministic
/// given seed.
std::vector<int> apply_noise(std::span<const int> labels, const TransitionMatrix& q,
                             std::uint64_t seed);

struct ModelNoiseResult {
    std::vector<int> noisy_labels;
    double weak_test_accuracy = 0.0;
    double realized_noise_rate = 0.0;
};

/// Train a weak classifier on a uniformly sampled fraction of the training
/// set, then relabel the whole training set with its argmax predictions.
ModelNoiseResult model_generated_noise(const Dataset& dataset, double labeled_fraction,
                                       const TrainConfig& weak_config, std::uint64_t seed);

/// Single-column CSV with header "noisy_label".
void write_noisy_labels_csv(std::span<const int> labels, const std::string& path);

}  // namespace sprl
