#include "sprl/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sprl {

double LrSchedule::lr_at(double base_lr, int epoch) const {
    if (epoch <= decay_start) return base_lr;
    return base_lr * static_cast<double>(total_epochs - epoch) /
           static_cast<double>(total_epochs - decay_start);
}

double LrSchedule::beta1_at(double beta1_base, int epoch) const {
    return epoch <= decay_start ? beta1_base : beta1_after_decay;
}

LrSchedule default_schedule(int total_epochs) {
    LrSchedule s;
    s.total_epochs = total_epochs;
    s.decay_start = std::max(1, (total_epochs * 2) / 5);
    if (s.decay_start >= total_epochs) s.decay_start = total_epochs - 1;
    return s;
}

AdamState make_adam_state(const ModelParams& params, double base_lr) {
    AdamState s;
    s.base_lr = base_lr;
    for (const auto& w : params.weights) {
        s.m_w.emplace_back(w.rows, w.cols);
        s.v_w.emplace_back(w.rows, w.cols);
    }
    for (const auto& b : params.biases) {
        s.m_b.emplace_back(b.size(), 0.0);
        s.v_b.emplace_back(b.size(), 0.0);
    }
    return s;
}

namespace {

void update_block(double* w, const double* g, double* m, double* v, std::size_t n,
                  double lr, double b1, double b2, double eps, double bc1, double bc2,
                  int layer, const char* kind) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(g[i]))
            throw std::runtime_error("adam_step: non-finite gradient in layer " +
                                     std::to_string(layer) + " " + kind + " at index " +
                                     std::to_string(i));
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               int epoch, const LrSchedule& schedule) {
    if (schedule.decay_start >= schedule.total_epochs)
        throw std::invalid_argument("adam_step: decay_start must be below total_epochs");
    if (grads.weights.size() != params.weights.size())
        throw std::invalid_argument("adam_step: gradient shape mismatch");

    state.step_count += 1;
    const double lr = schedule.lr_at(state.base_lr, epoch);
    const double b1 = schedule.beta1_at(state.beta1, epoch);
    const double b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));

    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        update_block(params.weights[l].data.data(), grads.weights[l].data.data(),
                     state.m_w[l].data.data(), state.v_w[l].data.data(),
                     params.weights[l].data.size(), lr, b1, b2, state.epsilon, bc1, bc2,
                     static_cast<int>(l), "weights");
        update_block(params.biases[l].data(), grads.biases[l].data(), state.m_b[l].data(),
                     state.v_b[l].data(), params.biases[l].size(), lr, b1, b2, state.epsilon,
                     bc1, bc2, static_cast<int>(l), "biases");
    }
}

}  // namespace sprl
