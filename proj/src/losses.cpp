#include "sprl/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sprl {

ScalarLoss cross_entropy(std::span<const double> probs, int label) {
    if (label < 0 || label >= static_cast<int>(probs.size()))
        throw std::invalid_argument("cross_entropy: label " + std::to_string(label) +
                                    " out of range for c=" + std::to_string(probs.size()));
    ScalarLoss out;
    out.grad.assign(probs.size(), 0.0);
    const double p = clamp_prob(probs[label]);
    out.value = -std::log(p);
    out.grad[label] = -1.0 / p;
    return out;
}

ScalarLoss resistance_loss(std::span<const double> probs, std::span<const double> prev) {
    if (probs.size() != prev.size())
        throw std::invalid_argument("resistance_loss: length mismatch");
    ScalarLoss out;
    out.grad.resize(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
        const double p = clamp_prob(probs[j]);
        out.value -= prev[j] * std::log(p);
        out.grad[j] = -prev[j] / p;
    }
    return out;
}

ScalarLoss kd_loss(std::span<const double> probs, std::span<const double> prev) {
    if (probs.size() != prev.size()) throw std::invalid_argument("kd_loss: length mismatch");
    ScalarLoss out;
    out.grad.resize(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
        const double p = clamp_prob(probs[j]);
        const double q = clamp_prob(prev[j]);
        out.value += q * std::log(q / p);
        out.grad[j] = -prev[j] / p;
    }
    // KL is nonnegative; rounding can leave a tiny negative residue.
    if (out.value < 0.0 && out.value > -1e-15) out.value = 0.0;
    return out;
}

ScalarLoss label_smooth_loss(std::span<const double> probs) {
    ScalarLoss out;
    out.grad.resize(probs.size());
    const double u = 1.0 / static_cast<double>(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
        const double p = clamp_prob(probs[j]);
        out.value += u * std::log(u / p);
        out.grad[j] = -u / p;
    }
    if (out.value < 0.0 && out.value > -1e-15) out.value = 0.0;
    return out;
}

ScalarLoss bootstrap_hard_loss(std::span<const double> probs, int noisy_label, double beta) {
    if (beta < 0.0 || beta > 1.0)
        throw std::invalid_argument("bootstrap_hard_loss: beta must lie in [0,1]");
    int arg = 0;
    for (std::size_t j = 1; j < probs.size(); ++j)
        if (probs[j] > probs[arg]) arg = static_cast<int>(j);

    const ScalarLoss noisy = cross_entropy(probs, noisy_label);
    const ScalarLoss self = cross_entropy(probs, arg);
    ScalarLoss out;
    out.value = beta * noisy.value + (1.0 - beta) * self.value;
    out.grad.resize(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j)
        out.grad[j] = beta * noisy.grad[j] + (1.0 - beta) * self.grad[j];
    return out;
}

std::vector<double> prop1_update(std::span<const double> prev, std::span<const double> cur,
                                 double eta) {
    if (prev.size() != cur.size()) throw std::invalid_argument("prop1_update: length mismatch");
    if (eta <= 0.0) throw std::invalid_argument("prop1_update: eta must be positive");
    std::vector<double> next(cur.size());
    for (std::size_t j = 0; j < cur.size(); ++j) next[j] = cur[j] + eta * prev[j] / cur[j];
    return next;
}

Prop1Result prop1_step(std::span<const double> prev, std::span<const double> cur, double eta,
                       int j, int k) {
    if (j == k || j < 0 || k < 0 || j >= static_cast<int>(cur.size()) ||
        k >= static_cast<int>(cur.size()))
        throw std::invalid_argument("prop1_step: bad entry pair");
    if (!(cur[j] > cur[k]))
        throw std::invalid_argument("prop1_step: requires cur[j] > cur[k]");

    Prop1Result res;
    res.next = prop1_update(prev, cur, eta);
    const double r = cur[j] / cur[k];
    const double q = prev[j] / prev[k];
    if (q < r)
        res.which = Prop1Case::i;
    else if (q > r * r)
        res.which = Prop1Case::ii;
    else
        res.which = Prop1Case::iii;
    return res;
}

BatchLoss combined_batch_loss(const DenseMatrix& probs, const DenseMatrix& prev,
                              std::span<const int> noisy_labels,
                              std::span<const std::uint8_t> selected, double gamma_t,
                              Regularizer reg) {
    if (gamma_t < 0.0) throw std::invalid_argument("combined_batch_loss: gamma_t must be >= 0");
    const int batch = probs.rows;
    if (prev.rows != batch || prev.cols != probs.cols ||
        static_cast<int>(noisy_labels.size()) != batch ||
        static_cast<int>(selected.size()) != batch)
        throw std::invalid_argument("combined_batch_loss: shape mismatch");

    BatchLoss out;
    out.grad = DenseMatrix(batch, probs.cols);

    int selected_count = 0;
    for (std::uint8_t v : selected) selected_count += v ? 1 : 0;

    if (selected_count > 0) {
        const double inv = 1.0 / selected_count;
        for (int i = 0; i < batch; ++i) {
            if (!selected[i]) continue;
            ScalarLoss ce = cross_entropy(probs.row(i), noisy_labels[i]);
            out.value += inv * ce.value;
            auto g = out.grad.row(i);
            for (int j = 0; j < probs.cols; ++j) g[j] += inv * ce.grad[j];
        }
    }

    const double scale = gamma_t / batch;
    for (int i = 0; i < batch; ++i) {
        ScalarLoss r;
        switch (reg) {
            case Regularizer::resistance: r = resistance_loss(probs.row(i), prev.row(i)); break;
            case Regularizer::kd: r = kd_loss(probs.row(i), prev.row(i)); break;
            case Regularizer::label_smooth: r = label_smooth_loss(probs.row(i)); break;
        }
        out.value += scale * r.value;
        auto g = out.grad.row(i);
        for (int j = 0; j < probs.cols; ++j) g[j] += scale * r.grad[j];
    }
    return out;
}

BatchLoss sprl_batch_loss(const DenseMatrix& probs, const DenseMatrix& prev,
                          std::span<const int> noisy_labels,
                          std::span<const std::uint8_t> selected, double gamma_t) {
    return combined_batch_loss(probs, prev, noisy_labels, selected, gamma_t,
                               Regularizer::resistance);
}

BatchLoss bootstrap_batch_loss(const DenseMatrix& probs, std::span<const int> noisy_labels,
                               double beta) {
    if (probs.rows != static_cast<int>(noisy_labels.size()))
        throw std::invalid_argument("bootstrap_batch_loss: shape mismatch");
    BatchLoss out;
    out.grad = DenseMatrix(probs.rows, probs.cols);
    const double inv = 1.0 / probs.rows;
    for (int i = 0; i < probs.rows; ++i) {
        ScalarLoss l = bootstrap_hard_loss(probs.row(i), noisy_labels[i], beta);
        out.value += inv * l.value;
        auto g = out.grad.row(i);
        for (int j = 0; j < probs.cols; ++j) g[j] = inv * l.grad[j];
    }
    return out;
}

}  // namespace sprl
