#pragma once

#include "sprl/model.hpp"

namespace sprl {

/// Learning-rate and momentum schedule: constant up to decay_start, then the
/// rate falls linearly to exactly 0 at total_epochs while beta1 drops to
/// beta1_after_decay. Epochs are 1-based.
struct LrSchedule {
    int total_epochs = 200;
    int decay_start = 80;
    double beta1_after_decay = 0.1;

    double lr_at(double base_lr, int epoch) const;
    double beta1_at(double beta1_base, int epoch) const;
};

LrSchedule default_schedule(int total_epochs);  // decay_start = floor(0.4 T)

struct AdamState {
    std::vector<DenseMatrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    long step_count = 0;
    double beta1 = 0.9;  // pre-decay value; schedule may override per epoch
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double base_lr = 1e-3;
};

AdamState make_adam_state(const ModelParams& params, double base_lr);

/// One Adam update with bias correction. Effective lr and beta1 come from the
/// schedule at `epoch`. Throws on non-finite gradients.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               int epoch, const LrSchedule& schedule);

}  // namespace sprl
