#pragma once

#include <span>
#include <string>
#include <vector>

#include "sprl/matrix.hpp"
#include "sprl/rng.hpp"

namespace sprl {

enum class Activation { relu, leaky_relu };  // leaky slope fixed at 0.1

/// Weights and biases of a softmax classifier with 0-2 hidden layers.
/// weights[l] is [in x out]; a sample is a row vector, layers multiply on
/// the right.
struct ModelParams {
    std::vector<DenseMatrix> weights;
    std::vector<std::vector<double>> biases;
    Activation hidden_activation = Activation::relu;

    int input_dim() const { return weights.front().rows; }
    int output_dim() const { return weights.back().cols; }
    int layer_count() const { return static_cast<int>(weights.size()); }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& w : weights) n += w.data.size();
        for (const auto& b : biases) n += b.size();
        return n;
    }
};

/// Gradient block shaped exactly like ModelParams.
struct Gradients {
    std::vector<DenseMatrix> weights;
    std::vector<std::vector<double>> biases;

    bool all_finite() const;
};

/// Per-batch activations recorded by forward() and consumed by backward().
struct ForwardCache {
    DenseMatrix input;                     // batch x d
    std::vector<DenseMatrix> pre_acts;     // z_l for every layer
    std::vector<DenseMatrix> activations;  // post-activation of hidden layers
    DenseMatrix probs;                     // batch x c
};

/// He-initialised MLP; biases zero. hidden may hold 0, 1 or 2 widths.
ModelParams make_mlp(int input_dim, std::span<const int> hidden, int classes,
                     Activation act, SplitRng& rng);

Gradients zero_gradients(const ModelParams& params);

/// Numerically stable softmax (max subtraction). Throws on non-finite input.
void softmax_row(std::span<const double> logits, std::span<double> out);
std::vector<double> softmax(std::span<const double> logits);

/// Batch forward pass. Each output row is a probability vector. If cache is
/// non-null the activations needed by backward() are recorded.
DenseMatrix forward(const ModelParams& params, const DenseMatrix& features,
                    ForwardCache* cache = nullptr);

/// Backpropagate dL/dprobs (batch x c) to parameter gradients, summed over
/// the batch. Loss code owns every normalisation constant; this only applies
/// the softmax Jacobian and the chain rule through hidden layers.
Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const DenseMatrix& dloss_dprobs);

}  // namespace sprl
