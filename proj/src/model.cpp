#include "sprl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sprl {

bool Gradients::all_finite() const {
    for (const auto& w : weights)
        if (!w.all_finite()) return false;
    for (const auto& b : biases)
        for (double v : b)
            if (!std::isfinite(v)) return false;
    return true;
}

ModelParams make_mlp(int input_dim, std::span<const int> hidden, int classes,
                     Activation act, SplitRng& rng) {
    if (input_dim <= 0 || classes <= 0) throw std::invalid_argument("make_mlp: bad dimensions");
    if (hidden.size() > 2) throw std::invalid_argument("make_mlp: at most two hidden layers");

    ModelParams p;
    p.hidden_activation = act;
    int in = input_dim;
    auto add_layer = [&](int out) {
        DenseMatrix w(in, out);
        const double scale = std::sqrt(2.0 / in);
        for (double& v : w.data) v = scale * rng.normal();
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(out, 0.0);
        in = out;
    };
    for (int h : hidden) {
        if (h <= 0) throw std::invalid_argument("make_mlp: hidden width must be positive");
        add_layer(h);
    }
    add_layer(classes);
    return p;
}

Gradients zero_gradients(const ModelParams& params) {
    Gradients g;
    for (const auto& w : params.weights) g.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : params.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

void softmax_row(std::span<const double> logits, std::span<double> out) {
    double mx = logits[0];
    for (double v : logits) {
        if (!std::isfinite(v)) throw std::invalid_argument("softmax: non-finite logit");
        mx = std::max(mx, v);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] = std::exp(logits[j] - mx);
        sum += out[j];
    }
    for (std::size_t j = 0; j < logits.size(); ++j) out[j] /= sum;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    softmax_row(logits, out);
    return out;
}

namespace {

double activate(double z, Activation a) {
    if (a == Activation::relu) return z > 0.0 ? z : 0.0;
    return z > 0.0 ? z : 0.1 * z;
}

double activate_grad(double z, Activation a) {
    if (a == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
    return z > 0.0 ? 1.0 : 0.1;
}

DenseMatrix affine(const DenseMatrix& x, const DenseMatrix& w, const std::vector<double>& b) {
    DenseMatrix z = matmul(x, w);
    for (int i = 0; i < z.rows; ++i) {
        auto zr = z.row(i);
        for (int j = 0; j < z.cols; ++j) zr[j] += b[j];
    }
    return z;
}

}  // namespace

DenseMatrix forward(const ModelParams& params, const DenseMatrix& features, ForwardCache* cache) {
    if (features.cols != params.input_dim())
        throw std::invalid_argument("forward: feature width " + std::to_string(features.cols) +
                                    " does not match model input " + std::to_string(params.input_dim()));
    if (cache) {
        *cache = ForwardCache{};
        cache->input = features;
    }

    const int layers = params.layer_count();
    DenseMatrix act = features;
    for (int l = 0; l < layers; ++l) {
        DenseMatrix z = affine(act, params.weights[l], params.biases[l]);
        if (l == layers - 1) {
            DenseMatrix probs(z.rows, z.cols);
            for (int i = 0; i < z.rows; ++i) softmax_row(z.row(i), probs.row(i));
            if (cache) {
                cache->pre_acts.push_back(std::move(z));
                cache->probs = probs;
            }
            return probs;
        }
        DenseMatrix a(z.rows, z.cols);
        for (std::size_t k = 0; k < z.data.size(); ++k)
            a.data[k] = activate(z.data[k], params.hidden_activation);
        if (cache) {
            cache->pre_acts.push_back(std::move(z));
            cache->activations.push_back(a);
        }
        act = std::move(a);
    }
    throw std::logic_error("forward: model has no layers");
}

Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const DenseMatrix& dloss_dprobs) {
    const int layers = params.layer_count();
    const DenseMatrix& probs = cache.probs;
    if (dloss_dprobs.rows != probs.rows || dloss_dprobs.cols != probs.cols)
        throw std::invalid_argument("backward: dL/dprobs shape mismatch");

    Gradients grads = zero_gradients(params);

    // Softmax Jacobian: dL/dz_j = p_j * (dL/dp_j - sum_k dL/dp_k p_k).
    DenseMatrix delta(probs.rows, probs.cols);
    for (int i = 0; i < probs.rows; ++i) {
        auto p = probs.row(i);
        auto g = dloss_dprobs.row(i);
        double dot = 0.0;
        for (int j = 0; j < probs.cols; ++j) dot += g[j] * p[j];
        auto d = delta.row(i);
        for (int j = 0; j < probs.cols; ++j) d[j] = p[j] * (g[j] - dot);
    }

    for (int l = layers - 1; l >= 0; --l) {
        const DenseMatrix& input = (l == 0) ? cache.input : cache.activations[l - 1];
        DenseMatrix& dw = grads.weights[l];
        std::vector<double>& db = grads.biases[l];
        for (int i = 0; i < delta.rows; ++i) {
            auto drow = delta.row(i);
            auto xrow = input.row(i);
            for (int k = 0; k < dw.rows; ++k) {
                const double xik = xrow[k];
                if (xik == 0.0) continue;
                auto dwrow = dw.row(k);
                for (int j = 0; j < dw.cols; ++j) dwrow[j] += xik * drow[j];
            }
            for (int j = 0; j < dw.cols; ++j) db[j] += drow[j];
        }
        if (l == 0) break;

        // Propagate through the activation of the previous hidden layer.
        const DenseMatrix& w = params.weights[l];
        const DenseMatrix& z_prev = cache.pre_acts[l - 1];
        DenseMatrix next(delta.rows, w.rows);
        for (int i = 0; i < delta.rows; ++i) {
            auto drow = delta.row(i);
            auto nrow = next.row(i);
            auto zrow = z_prev.row(i);
            for (int k = 0; k < w.rows; ++k) {
                double acc = 0.0;
                auto wrow = w.row(k);
                for (int j = 0; j < w.cols; ++j) acc += drow[j] * wrow[j];
                nrow[k] = acc * activate_grad(zrow[k], params.hidden_activation);
            }
        }
        delta = std::move(next);
    }
    return grads;
}

}  // namespace sprl
